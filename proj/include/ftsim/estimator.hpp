#pragma once

// Distributed finite-time leader estimators. Each agent carries estimates of
// the leader's state blocks plus an auxiliary pair (xi, rho) that
// reconstructs the leader's last-block derivative through a super-twisting
// loop available only to pinned agents (a_i0 > 0). Every use of the leader's
// true state carries an a_i0 factor, so unpinned agents are structurally
// blind to it.

#include <Eigen/Core>

#include <vector>

#include "ftsim/graph.hpp"
#include "ftsim/primitives.hpp"

namespace ftsim {

struct EstimatorState {
  Eigen::MatrixXd xhat;   // n x m, column k = estimate of leader block k+1
  Eigen::VectorXd eta;    // estimate of the leader's last-block derivative
  Eigen::VectorXd xi_f;   // filter state, xi(0) = 0
  Eigen::VectorXd rho;    // filter output, rho(0) = 0

  static EstimatorState zero(int dim, int order);
};

struct EstimatorGains {
  Eigen::VectorXd kappa_k;  // per-order gains for blocks 1..m-1
  double kappa_m = 5.0;
  double kappa_eta = 8.0;
  double kappa_xi = 6.0;
  double kappa_rho = 4.0;   // must exceed sup |leader jerk| + 1 for convergence
  double alpha = 0.7;       // exponent for the eta loop, in (0.5, 1)
  double beta = 0.7;        // exponent for block m
  double gamma = 0.7;       // exponent for blocks 1..m-1

  void validate(int order) const;
};

// Consensus correction terms kappa * sig(.) of each block, one n x m matrix
// per agent. These are exactly the terms the local controllers subtract when
// differentiating their tracking errors, so they are exposed separately.
void estimator_corrections(const std::vector<EstimatorState>& est,
                           const Eigen::MatrixXd& leader_x0, const DirectedLeaderGraph& g,
                           const std::vector<EstimatorGains>& gains,
                           std::vector<Eigen::MatrixXd>& out);

// Full estimator right-hand side for all agents. leader_x0 is n x m; only
// agents with a_i0 > 0 actually consume it. Pass `corrections` to also
// receive the per-agent correction matrices of the same evaluation.
void estimator_derivative(const std::vector<EstimatorState>& est, const Eigen::MatrixXd& leader_x0,
                          const DirectedLeaderGraph& g, const std::vector<EstimatorGains>& gains,
                          const SignumPolicy& policy, std::vector<EstimatorState>& deriv,
                          std::vector<Eigen::MatrixXd>* corrections = nullptr);

struct EstimationErrors {
  Eigen::MatrixXd xtilde;      // xhat - x0
  Eigen::VectorXd eta_tilde;   // eta - x0m_dot
  Eigen::VectorXd xi_tilde;    // xi - x0 last block
  Eigen::VectorXd rho_tilde;   // rho - x0m_dot
};

// x0m_dot is the analytic last-block derivative of the leader; it exists in
// the harness for error reporting only, never inside the distributed law.
EstimationErrors estimation_errors(const EstimatorState& est, const Eigen::MatrixXd& x0,
                                   const Eigen::VectorXd& x0m_dot);

// Task-space variant: chi/vartheta/eta estimate the reference position,
// velocity, and acceleration; (xi, rho) track the reference velocity.
struct TaskEstimatorState {
  Eigen::VectorXd chi, vartheta, eta, xi_f, rho;

  static TaskEstimatorState zero(int dim);
};

struct TaskEstimatorGains {
  double k_chi = 15.0;
  double k_vartheta = 5.0;
  double k_eta = 8.0;
  double k_xi = 6.0;
  double k_rho = 4.0;
  double alpha = 0.7;
  double beta = 0.7;
  double gamma = 0.7;
};

void task_estimator_derivative(const std::vector<TaskEstimatorState>& est,
                               const Eigen::VectorXd& xd, const Eigen::VectorXd& xd_dot,
                               const DirectedLeaderGraph& g,
                               const std::vector<TaskEstimatorGains>& gains,
                               const SignumPolicy& policy,
                               std::vector<TaskEstimatorState>& deriv);

}  // namespace ftsim
