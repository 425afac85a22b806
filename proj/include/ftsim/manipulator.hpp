#pragma once

// Two-link planar manipulator: inertia/Coriolis/gravity matrices in the
// five-parameter form, friction, forward kinematics, Jacobian, and the
// dynamic (2x5) and kinematic (2x4) regressors that factor the model into
// known-signal matrices times unknown constant parameters.

#include <Eigen/Core>

#include <array>
#include <functional>

#include "ftsim/plant.hpp"

namespace ftsim {

using Vector5d = Eigen::Matrix<double, 5, 1>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Matrix25d = Eigen::Matrix<double, 2, 5>;
using Matrix24d = Eigen::Matrix<double, 2, 4>;

struct ArmParams {
  double m1 = 1.0, m2 = 1.0;    // link masses [kg]
  double I1 = 0.1, I2 = 0.1;    // link inertias [kg m^2]
  double l1 = 1.0, l2 = 1.0;    // link lengths [m]
  double lc1 = 0.5, lc2 = 0.5;  // center-of-mass offsets [m]
  double v1 = 1.0, v2 = 1.0;    // task-space scaling factors
  Eigen::Matrix2d Fv = Eigen::Matrix2d::Identity();  // viscous friction
  Eigen::Matrix2d Fc = Eigen::Matrix2d::Ones();      // Coulomb friction
  double grav = 9.81;           // 0 disables gravity (horizontal plane)

  void validate() const;
};

struct ArmState {
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  Eigen::Vector2d qdot = Eigen::Vector2d::Zero();
};

// The five dynamic parameter combinations (positive in entries 1, 2, 4, 5).
Vector5d theta_vector(const ArmParams& p);

// Kinematic parameter vector a = (l1 v1, l2 v1, l1 v2, l2 v2), ordered so
// that J(q) qdot = Z(q, qdot) a holds with the regressor below.
Eigen::Vector4d kin_params(const ArmParams& p);

struct DynamicsMatrices {
  Eigen::Matrix2d M, C;
  Eigen::Vector2d G;
};

DynamicsMatrices dynamics_matrices(const ArmState& s, const ArmParams& p);

// Fv tanh(qdot) + Fc sgn(qdot), sgn componentwise with sgn(0) = 0.
Eigen::Vector2d friction(const Eigen::Vector2d& qdot, const ArmParams& p);

Eigen::Vector2d forward_kinematics(const Eigen::Vector2d& q, const ArmParams& p);

Eigen::Matrix2d jacobian(const Eigen::Vector2d& q, const ArmParams& p);

// Jacobian parameterized by an explicit kinematic vector (used with the
// adaptive estimate a_hat in place of the true products l*v).
Eigen::Matrix2d jacobian_from_kinparams(const Eigen::Vector2d& q, const Eigen::Vector4d& a);

// d/dt of jacobian_from_kinparams along (qdot, adot); linear in a, so the
// parameter part is the same trig matrix applied to adot.
Eigen::Matrix2d jacobian_time_derivative(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                                         const Eigen::Vector4d& a, const Eigen::Vector4d& adot);

// Z(q, qdot) with J(q) qdot = Z(q, qdot) a identically in a.
Matrix24d kinematic_regressor(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot);

// Y with M(q) qr_ddot + C(q, qdot) qr_dot + G(q) = Y theta identically in
// theta. Columns were derived once by collecting theta coefficients; the
// identity is enforced by tests.
Matrix25d dynamic_regressor(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                            const Eigen::Vector2d& qr_dot, const Eigen::Vector2d& qr_ddot,
                            double grav = 9.81);

struct ArmDerivative {
  Eigen::Vector2d qdot, qddot;
};

// M qddot + C qdot + G + F = g(t) tau_a + d(t) with tau_a the faulted torque.
ArmDerivative arm_derivative(const ArmState& s, const Eigen::Vector2d& tau, double t,
                             const ArmParams& p, const FaultProfile& fault,
                             const std::function<double(double)>& g_fn,
                             const std::function<Eigen::Vector2d(double)>& d_fn);

// The six-robot parameter preset used by the shipped manipulator scenario.
std::array<ArmParams, 6> paper_arms();

}  // namespace ftsim
