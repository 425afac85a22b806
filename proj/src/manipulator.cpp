#include "ftsim/manipulator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "ftsim/primitives.hpp"

namespace ftsim {

void ArmParams::validate() const {
  if (!(m1 > 0 && m2 > 0 && I1 > 0 && I2 > 0 && l1 > 0 && l2 > 0 && lc1 > 0 && lc2 > 0))
    throw std::invalid_argument("ArmParams: masses, inertias and lengths must be positive");
}

Vector5d theta_vector(const ArmParams& p) {
  p.validate();
  Vector5d th;
  th << p.I1 + p.m1 * p.lc1 * p.lc1 + p.m2 * p.l1 * p.l1,
        p.I2 + p.m2 * p.lc2 * p.lc2,
        p.m2 * p.l1 * p.lc2,
        (p.m1 + p.m2) * p.l1,
        p.m2 * p.l2;
  return th;
}

Eigen::Vector4d kin_params(const ArmParams& p) {
  return Eigen::Vector4d(p.l1 * p.v1, p.l2 * p.v1, p.l1 * p.v2, p.l2 * p.v2);
}

DynamicsMatrices dynamics_matrices(const ArmState& s, const ArmParams& p) {
  const Vector5d th = theta_vector(p);
  const double c2 = std::cos(s.q(1));
  const double s2 = std::sin(s.q(1));

  DynamicsMatrices d;
  d.M << th(0) + th(1) + 2.0 * th(2) * c2, th(1) + th(2) * c2,
         th(1) + th(2) * c2, th(1);
  d.C << -th(2) * s2 * s.qdot(1), -th(2) * s2 * (s.qdot(0) + s.qdot(1)),
         th(2) * s2 * s.qdot(0), 0.0;
  const double c1 = std::cos(s.q(0));
  const double c12 = std::cos(s.q(0) + s.q(1));
  d.G << th(3) * p.grav * c1 + th(4) * p.grav * c12,
         th(4) * p.grav * c12;
  return d;
}

Eigen::Vector2d friction(const Eigen::Vector2d& qdot, const ArmParams& p) {
  Eigen::Vector2d sg(sgn(qdot(0)), sgn(qdot(1)));
  return p.Fv * qdot.array().tanh().matrix() + p.Fc * sg;
}

Eigen::Vector2d forward_kinematics(const Eigen::Vector2d& q, const ArmParams& p) {
  const double c1 = std::cos(q(0)), s1 = std::sin(q(0));
  const double c12 = std::cos(q(0) + q(1)), s12 = std::sin(q(0) + q(1));
  return Eigen::Vector2d(c12 * p.l2 * p.v1 + c1 * p.l1 * p.v1,
                         s12 * p.l2 * p.v2 + s1 * p.l1 * p.v2);
}

Eigen::Matrix2d jacobian(const Eigen::Vector2d& q, const ArmParams& p) {
  return jacobian_from_kinparams(q, kin_params(p));
}

Eigen::Matrix2d jacobian_from_kinparams(const Eigen::Vector2d& q, const Eigen::Vector4d& a) {
  const double c1 = std::cos(q(0)), s1 = std::sin(q(0));
  const double c12 = std::cos(q(0) + q(1)), s12 = std::sin(q(0) + q(1));
  Eigen::Matrix2d J;
  J << -s12 * a(1) - s1 * a(0), -s12 * a(1),
       c12 * a(3) + c1 * a(2), c12 * a(3);
  return J;
}

Eigen::Matrix2d jacobian_time_derivative(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                                         const Eigen::Vector4d& a, const Eigen::Vector4d& adot) {
  const double c1 = std::cos(q(0)), s1 = std::sin(q(0));
  const double c12 = std::cos(q(0) + q(1)), s12 = std::sin(q(0) + q(1));
  const double w = qdot(0) + qdot(1);
  Eigen::Matrix2d Jq;
  Jq << -c12 * w * a(1) - c1 * qdot(0) * a(0), -c12 * w * a(1),
        -s12 * w * a(3) - s1 * qdot(0) * a(2), -s12 * w * a(3);
  return Jq + jacobian_from_kinparams(q, adot);
}

Matrix24d kinematic_regressor(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot) {
  const double c1 = std::cos(q(0)), s1 = std::sin(q(0));
  const double c12 = std::cos(q(0) + q(1)), s12 = std::sin(q(0) + q(1));
  const double w = qdot(0) + qdot(1);
  Matrix24d Z;
  Z << -s1 * qdot(0), -s12 * w, 0.0, 0.0,
       0.0, 0.0, c1 * qdot(0), c12 * w;
  return Z;
}

Matrix25d dynamic_regressor(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                            const Eigen::Vector2d& qr_dot, const Eigen::Vector2d& qr_ddot,
                            double grav) {
  const double c1 = std::cos(q(0));
  const double c2 = std::cos(q(1)), s2 = std::sin(q(1));
  const double c12 = std::cos(q(0) + q(1));
  Matrix25d Y;
  Y << qr_ddot(0),
       qr_ddot(0) + qr_ddot(1),
       c2 * (2.0 * qr_ddot(0) + qr_ddot(1)) - s2 * qdot(1) * qr_dot(0) -
           s2 * (qdot(0) + qdot(1)) * qr_dot(1),
       grav * c1,
       grav * c12,
       0.0,
       qr_ddot(0) + qr_ddot(1),
       c2 * qr_ddot(0) + s2 * qdot(0) * qr_dot(0),
       0.0,
       grav * c12;
  return Y;
}

ArmDerivative arm_derivative(const ArmState& s, const Eigen::Vector2d& tau, double t,
                             const ArmParams& p, const FaultProfile& fault,
                             const std::function<double(double)>& g_fn,
                             const std::function<Eigen::Vector2d(double)>& d_fn) {
  const Eigen::Vector2d tau_a = apply_fault(tau, t, fault);
  const DynamicsMatrices dm = dynamics_matrices(s, p);
  const Eigen::Vector2d rhs =
      g_fn(t) * tau_a + d_fn(t) - dm.C * s.qdot - dm.G - friction(s.qdot, p);
  ArmDerivative d;
  d.qdot = s.qdot;
  d.qddot = dm.M.inverse() * rhs;  // M is 2x2 SPD
  return d;
}

std::array<ArmParams, 6> paper_arms() {
  // rows: m1 m2 I1 I2 l1 l2 lc1 lc2
  constexpr double table[6][8] = {
      {1.5, 1.3, 0.50, 0.43, 2.0, 2.0, 1.00, 1.00},
      {1.2, 1.5, 0.53, 0.36, 2.3, 1.7, 1.15, 0.85},
      {1.2, 1.3, 0.32, 0.52, 1.8, 2.2, 0.90, 1.10},
      {1.8, 1.5, 0.66, 0.45, 2.1, 1.9, 1.05, 0.95},
      {1.7, 1.6, 0.56, 0.43, 2.0, 1.8, 1.00, 0.90},
      {1.9, 1.3, 0.46, 0.48, 1.7, 2.1, 0.85, 1.05},
  };
  std::array<ArmParams, 6> arms;
  for (int i = 0; i < 6; ++i) {
    ArmParams& a = arms[static_cast<std::size_t>(i)];
    a.m1 = table[i][0];
    a.m2 = table[i][1];
    a.I1 = table[i][2];
    a.I2 = table[i][3];
    a.l1 = table[i][4];
    a.l2 = table[i][5];
    a.lc1 = table[i][6];
    a.lc2 = table[i][7];
    a.v1 = a.v2 = 1.0;
    a.Fv = Eigen::Matrix2d::Identity();
    a.Fc = Eigen::Matrix2d::Ones();
    a.grav = 9.81;
  }
  return arms;
}

}  // namespace ftsim
