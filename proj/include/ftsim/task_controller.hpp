#pragma once

// Task-space fault-tolerant controller for one manipulator: task sliding
// variable, adaptive-Jacobian reference trajectories, Nussbaum torque law,
// and the dynamic/kinematic adaptation laws. The controller only ever sees
// its own joint measurements, the local reference estimates, and its
// adaptive parameters; the true kinematic/dynamic parameters stay in the
// plant.

#include <Eigen/Core>

#include <functional>

#include "ftsim/manipulator.hpp"

namespace ftsim {

struct TaskControllerState {
  Vector5d theta_hat = Vector5d::Zero();
  Eigen::Vector4d a_hat = Eigen::Vector4d::Zero();
  Eigen::Vector2d eps_hat = Eigen::Vector2d::Zero();
  double kappa = 0.0;
  Eigen::Vector2d sx_integral = Eigen::Vector2d::Zero();
};

struct TaskGains {
  double alpha_x = 1.0;  // must exceed 3/4
  double alpha_r = 0.5;
  double k_kappa = 1.0;
  Eigen::Matrix2d K_s = 2.0 * Eigen::Matrix2d::Identity();  // must exceed I
  Eigen::Matrix2d Gamma_eps = Eigen::Matrix2d::Identity();
  Matrix5d Gamma_theta = 10.0 * Matrix5d::Identity();
  Eigen::Matrix4d Lambda = Eigen::Matrix4d::Identity();
  std::function<double(int, double)> delta;
  // e_x rate in the reference acceleration: measured task velocity by
  // default, or the adaptive-Jacobian estimate Jhat qdot when set.
  bool use_estimated_task_velocity = false;
  // Gravity constant baked into the regressor structure; matches the plant.
  double grav = 9.81;

  void validate() const;
};

struct SlidingErrors {
  Eigen::Vector2d e_x, e_v, s_x;
};

// e_x = x - chi, e_v = xdot - vartheta, s_x = e_v + alpha_x e_x.
SlidingErrors task_errors_and_sliding(const Eigen::Vector2d& x, const Eigen::Vector2d& xdot,
                                      const Eigen::Vector2d& chi, const Eigen::Vector2d& vartheta,
                                      const TaskGains& gains);

// Jhat^T (Jhat Jhat^T)^-1, switching to a ridge (+lambda I, lambda = 1e-8)
// only when det(Jhat Jhat^T) < 1e-10. Reports whether the ridge was active.
Eigen::Matrix2d jacobian_pinv(const Eigen::Matrix2d& jhat, bool* regularized = nullptr);

// Everything the local measurements and estimates feed the controller.
struct TaskLocalSignals {
  Eigen::Vector2d x, xdot;              // measured end-effector position/velocity
  Eigen::Vector2d chi, vartheta;        // local reference estimates
  Eigen::Vector2d chi_dot, vartheta_dot;  // their right-hand sides (locally computable)
};

struct ReferenceTrajectories {
  Eigen::Vector2d qr_dot, qr_ddot;
  Eigen::Vector2d s;                // joint-space sliding vector qdot - qr_dot
  SlidingErrors sliding;
  Eigen::Matrix2d jhat, jhat_pinv;
  Matrix24d Z;
  Eigen::Vector4d a_hat_dot;        // kinematic adaptation, needed inside qr_ddot
  bool pinv_regularized = false;
};

ReferenceTrajectories reference_trajectories(const ArmState& s, const TaskLocalSignals& sig,
                                             const TaskControllerState& cs, const TaskGains& gains);

struct TaskControlResult {
  Eigen::Vector2d tau;  // applied torque, tau = N(kappa) u
  Eigen::Vector2d u;    // pre-Nussbaum torque
};

TaskControlResult task_control_law(const Eigen::Vector2d& s, const Matrix25d& Y,
                                   const Eigen::Matrix2d& jhat, const TaskControllerState& cs,
                                   const TaskGains& gains, double t);

struct TaskAdaptationDerivs {
  Vector5d theta_hat_dot;
  Eigen::Vector4d a_hat_dot;
  Eigen::Vector2d eps_hat_dot;
  double kappa_dot = 0.0;
};

TaskAdaptationDerivs task_adaptation(const Eigen::Vector2d& s, const Eigen::Vector2d& s_x,
                                     const Eigen::Vector2d& sx_integral, const Matrix25d& Y,
                                     const Matrix24d& Z, const Eigen::Matrix2d& jhat,
                                     const Eigen::Vector2d& u, const TaskGains& gains, double t);

// One full controller evaluation: reference trajectories, torque, and all
// adaptation derivatives, plus the intermediates the trace logs.
struct TaskControlEval {
  ReferenceTrajectories ref;
  Matrix25d Y;
  TaskControlResult ctrl;
  TaskAdaptationDerivs adapt;
};

TaskControlEval task_control_step(const ArmState& s, const TaskLocalSignals& sig,
                                  const TaskControllerState& cs, const TaskGains& gains, double t);

}  // namespace ftsim
