#include "ftsim/task_controller.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "ftsim/controller.hpp"
#include "ftsim/primitives.hpp"

namespace ftsim {

void TaskGains::validate() const {
  if (!(alpha_x > 0.75)) throw std::invalid_argument("TaskGains: alpha_x must exceed 3/4");
  Eigen::Matrix2d KmI = K_s - Eigen::Matrix2d::Identity();
  // 2x2 positive definiteness via trace/determinant.
  if (!(KmI.trace() > 0.0 && KmI.determinant() > 0.0))
    throw std::invalid_argument("TaskGains: K_s - I must be positive definite");
  if (!(alpha_r > 0.0 && k_kappa > 0.0))
    throw std::invalid_argument("TaskGains: alpha_r and k_kappa must be positive");
}

SlidingErrors task_errors_and_sliding(const Eigen::Vector2d& x, const Eigen::Vector2d& xdot,
                                      const Eigen::Vector2d& chi, const Eigen::Vector2d& vartheta,
                                      const TaskGains& gains) {
  SlidingErrors e;
  e.e_x = x - chi;
  e.e_v = xdot - vartheta;
  e.s_x = e.e_v + gains.alpha_x * e.e_x;
  return e;
}

Eigen::Matrix2d jacobian_pinv(const Eigen::Matrix2d& jhat, bool* regularized) {
  Eigen::Matrix2d JJt = jhat * jhat.transpose();
  bool ridge = JJt.determinant() < 1e-10;
  if (ridge) JJt += 1e-8 * Eigen::Matrix2d::Identity();
  if (regularized) *regularized = ridge;
  return jhat.transpose() * JJt.inverse();
}

ReferenceTrajectories reference_trajectories(const ArmState& s, const TaskLocalSignals& sig,
                                             const TaskControllerState& cs,
                                             const TaskGains& gains) {
  ReferenceTrajectories r;
  r.sliding = task_errors_and_sliding(sig.x, sig.xdot, sig.chi, sig.vartheta, gains);
  r.jhat = jacobian_from_kinparams(s.q, cs.a_hat);
  r.jhat_pinv = jacobian_pinv(r.jhat, &r.pinv_regularized);
  r.Z = kinematic_regressor(s.q, s.qdot);

  r.qr_dot = r.jhat_pinv *
             (sig.vartheta - gains.alpha_x * r.sliding.e_x - gains.alpha_r * cs.sx_integral);
  r.s = s.qdot - r.qr_dot;

  // Kinematic adaptation drives a_hat, hence the Jacobian estimate; its rate
  // is part of d(Jhat)/dt below.
  r.a_hat_dot = gains.Lambda * r.Z.transpose() *
                (r.sliding.s_x + gains.alpha_r * cs.sx_integral - r.jhat * r.s);

  Eigen::Vector2d xdot_for_ex = gains.use_estimated_task_velocity ? (r.jhat * s.qdot) : sig.xdot;
  Eigen::Vector2d ex_dot = xdot_for_ex - sig.chi_dot;

  Eigen::Matrix2d jhat_dot = jacobian_time_derivative(s.q, s.qdot, cs.a_hat, r.a_hat_dot);
  // d/dt of Jhat^+ = Jhat^T W with W = (Jhat Jhat^T)^-1:
  //   Jhat_dot^T W + Jhat^T Wdot,  Wdot = -W (Jhat_dot Jhat^T + Jhat Jhat_dot^T) W.
  Eigen::Matrix2d JJt = r.jhat * r.jhat.transpose();
  if (r.pinv_regularized) JJt += 1e-8 * Eigen::Matrix2d::Identity();
  Eigen::Matrix2d W = JJt.inverse();
  Eigen::Matrix2d Wdot =
      -W * (jhat_dot * r.jhat.transpose() + r.jhat * jhat_dot.transpose()) * W;
  Eigen::Matrix2d jhat_pinv_dot = jhat_dot.transpose() * W + r.jhat.transpose() * Wdot;

  r.qr_ddot = r.jhat_pinv *
                  (sig.vartheta_dot - gains.alpha_x * ex_dot - gains.alpha_r * r.sliding.s_x) +
              jhat_pinv_dot * r.jhat * r.qr_dot;
  return r;
}

TaskControlResult task_control_law(const Eigen::Vector2d& s, const Matrix25d& Y,
                                   const Eigen::Matrix2d& jhat, const TaskControllerState& cs,
                                   const TaskGains& gains, double t) {
  Eigen::Vector2d sdelta = smoothed_sign(s, gains.delta, t);
  TaskControlResult r;
  r.u = Y * cs.theta_hat - jhat.transpose() * gains.K_s * jhat * s -
        Eigen::Vector2d(sdelta.asDiagonal() * cs.eps_hat);
  r.tau = nussbaum(cs.kappa) * r.u;
  return r;
}

TaskAdaptationDerivs task_adaptation(const Eigen::Vector2d& s, const Eigen::Vector2d& s_x,
                                     const Eigen::Vector2d& sx_integral, const Matrix25d& Y,
                                     const Matrix24d& Z, const Eigen::Matrix2d& jhat,
                                     const Eigen::Vector2d& u, const TaskGains& gains, double t) {
  Eigen::Vector2d sdelta = smoothed_sign(s, gains.delta, t);
  TaskAdaptationDerivs d;
  d.theta_hat_dot = -gains.Gamma_theta * Y.transpose() * s;
  d.a_hat_dot =
      gains.Lambda * Z.transpose() * (s_x + gains.alpha_r * sx_integral - jhat * s);
  d.eps_hat_dot = gains.Gamma_eps * (sdelta.asDiagonal() * s);
  d.kappa_dot = -gains.k_kappa * s.dot(u);
  return d;
}

TaskControlEval task_control_step(const ArmState& s, const TaskLocalSignals& sig,
                                  const TaskControllerState& cs, const TaskGains& gains,
                                  double t) {
  TaskControlEval ev;
  ev.ref = reference_trajectories(s, sig, cs, gains);
  ev.Y = dynamic_regressor(s.q, s.qdot, ev.ref.qr_dot, ev.ref.qr_ddot, gains.grav);
  ev.ctrl = task_control_law(ev.ref.s, ev.Y, ev.ref.jhat, cs, gains, t);
  ev.adapt = task_adaptation(ev.ref.s, ev.ref.sliding.s_x, cs.sx_integral, ev.Y, ev.ref.Z,
                             ev.ref.jhat, ev.ctrl.u, gains, t);
  return ev;
}

}  // namespace ftsim
