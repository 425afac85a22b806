#pragma once

// Fault-tolerant adaptive backstepping controller for one agent. Tracking
// errors are formed against the agent's own estimator output (never the
// leader directly), virtual controls are built recursively, and the final
// input is routed through a Nussbaum gain so the unknown, sign-varying
// control coefficient needs no prior knowledge.

#include <Eigen/Core>

#include <functional>

#include "ftsim/estimator.hpp"
#include "ftsim/primitives.hpp"

namespace ftsim {

struct ControllerState {
  Eigen::VectorXd theta_hat;  // r
  Eigen::VectorXd eps_hat;    // n
  double kappa = 0.0;         // Nussbaum argument
};

struct ControllerGains {
  Eigen::VectorXd kbar;          // m positive backstepping gains
  double k_kappa = 1.0;
  Eigen::MatrixXd Gamma_theta;   // r x r positive definite
  Eigen::MatrixXd Gamma_eps;     // n x n positive definite
  // delta(j, t) > 0 with finite integral over t; smooths the robust term.
  std::function<double(int, double)> delta;

  static std::function<double(int, double)> exp_delta(double delta0) {
    return [delta0](int, double t) { return delta0 * std::exp(-t); };
  }
};

struct BacksteppingResult {
  Eigen::MatrixXd ztilde;        // n x m transformed errors
  Eigen::MatrixXd zstar;         // n x m virtual controls, column k = z*_{k+1} (column 0 unused)
  Eigen::VectorXd zstar_dot_m;   // derivative of the last virtual control
};

// x is the agent's n x m plant state, est its estimator state, delta_i the
// formation offset applied to the first block, est_corrections the kappa*sig
// consensus terms of the same evaluation instant (needed to differentiate
// the tracking errors through the estimator dynamics). Requires m >= 2.
BacksteppingResult backstepping_errors(const Eigen::MatrixXd& x, const EstimatorState& est,
                                       const Eigen::VectorXd& delta_i, const ControllerGains& gains,
                                       const Eigen::MatrixXd& est_corrections);

struct ControlResult {
  Eigen::VectorXd u;     // applied input, u = N(kappa) ubar
  Eigen::VectorXd ubar;  // pre-Nussbaum input
};

ControlResult control_law(const BacksteppingResult& bs, const Eigen::MatrixXd& f_val,
                          const ControllerState& cs, const ControllerGains& gains, double t);

struct AdaptationDerivs {
  Eigen::VectorXd theta_hat_dot;
  Eigen::VectorXd eps_hat_dot;
  double kappa_dot = 0.0;
};

AdaptationDerivs adaptation_derivatives(const Eigen::VectorXd& ztilde_m,
                                        const Eigen::VectorXd& ubar, const Eigen::MatrixXd& f_val,
                                        const ControllerGains& gains, double t);

// Componentwise v_j / sqrt(v_j^2 + delta(j,t)^2), the smoothed unit vector
// used by both the robust term and the eps adaptation.
Eigen::VectorXd smoothed_sign(const Eigen::VectorXd& v,
                              const std::function<double(int, double)>& delta, double t);

}  // namespace ftsim
