#include "ftsim/estimator.hpp"

#include <stdexcept>

namespace ftsim {

EstimatorState EstimatorState::zero(int dim, int order) {
  EstimatorState s;
  s.xhat = Eigen::MatrixXd::Zero(dim, order);
  s.eta = Eigen::VectorXd::Zero(dim);
  s.xi_f = Eigen::VectorXd::Zero(dim);
  s.rho = Eigen::VectorXd::Zero(dim);
  return s;
}

void EstimatorGains::validate(int order) const {
  if (kappa_k.size() != order - 1)
    throw std::invalid_argument("EstimatorGains: kappa_k must have order-1 entries");
  if (kappa_k.size() > 0 && !(kappa_k.minCoeff() > 0.0))
    throw std::invalid_argument("EstimatorGains: kappa_k must be positive");
  if (!(kappa_m > 0.0 && kappa_eta > 0.0 && kappa_xi > 0.0 && kappa_rho > 0.0))
    throw std::invalid_argument("EstimatorGains: all gains must be positive");
  for (double e : {alpha, beta, gamma})
    if (!(e > 0.5 && e < 1.0))
      throw std::invalid_argument("EstimatorGains: exponents must lie in (0.5, 1)");
}

namespace {

void check_sizes(std::size_t n_agents, const DirectedLeaderGraph& g, std::size_t n_gains) {
  if (static_cast<int>(n_agents) != g.n || n_gains != n_agents)
    throw std::invalid_argument("estimator: agent/graph/gain count mismatch");
}

// Consensus disagreement of one block: sum_j a_ij (v_j - v_i) + a_i0 (v0 - v_i).
Eigen::VectorXd block_disagreement(int i, const DirectedLeaderGraph& g,
                                   const std::vector<const Eigen::VectorXd*>& values,
                                   const Eigen::VectorXd* leader_value) {
  const auto& vi = *values[static_cast<std::size_t>(i)];
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(vi.size());
  for (int j = 0; j < g.n; ++j) {
    double a = g.follower_weights(i, j);
    if (a > 0.0) acc += a * (*values[static_cast<std::size_t>(j)] - vi);
  }
  double a0 = g.leader_weights(i);
  if (a0 > 0.0 && leader_value) acc += a0 * (*leader_value - vi);
  return acc;
}

}  // namespace

void estimator_corrections(const std::vector<EstimatorState>& est,
                           const Eigen::MatrixXd& leader_x0, const DirectedLeaderGraph& g,
                           const std::vector<EstimatorGains>& gains,
                           std::vector<Eigen::MatrixXd>& out) {
  check_sizes(est.size(), g, gains.size());
  const int n = static_cast<int>(leader_x0.rows());
  const int m = static_cast<int>(leader_x0.cols());
  out.resize(est.size());

  std::vector<const Eigen::VectorXd*> blocks(est.size());
  std::vector<Eigen::VectorXd> col_cache(est.size());
  for (int k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < est.size(); ++j) {
      col_cache[j] = est[j].xhat.col(k);
      blocks[j] = &col_cache[j];
    }
    Eigen::VectorXd x0k = leader_x0.col(k);
    for (int i = 0; i < g.n; ++i) {
      auto& mat = out[static_cast<std::size_t>(i)];
      if (mat.rows() != n || mat.cols() != m) mat.resize(n, m);
      Eigen::VectorXd dis = block_disagreement(i, g, blocks, &x0k);
      const auto& gi = gains[static_cast<std::size_t>(i)];
      if (k + 1 < m)
        mat.col(k) = gi.kappa_k(k) * sig_pow(dis, gi.gamma);
      else
        mat.col(k) = gi.kappa_m * sig_pow(dis, gi.beta);
    }
  }
}

void estimator_derivative(const std::vector<EstimatorState>& est, const Eigen::MatrixXd& leader_x0,
                          const DirectedLeaderGraph& g, const std::vector<EstimatorGains>& gains,
                          const SignumPolicy& policy, std::vector<EstimatorState>& deriv,
                          std::vector<Eigen::MatrixXd>* corrections) {
  check_sizes(est.size(), g, gains.size());
  const int m = static_cast<int>(leader_x0.cols());
  for (const auto& gi : gains) gi.validate(m);

  std::vector<Eigen::MatrixXd> local_corr;
  std::vector<Eigen::MatrixXd>& corr = corrections ? *corrections : local_corr;
  estimator_corrections(est, leader_x0, g, gains, corr);

  deriv.resize(est.size());
  std::vector<const Eigen::VectorXd*> etas(est.size());
  for (std::size_t j = 0; j < est.size(); ++j) etas[j] = &est[j].eta;

  for (int i = 0; i < g.n; ++i) {
    const auto& s = est[static_cast<std::size_t>(i)];
    const auto& gi = gains[static_cast<std::size_t>(i)];
    auto& ds = deriv[static_cast<std::size_t>(i)];
    ds.xhat.resize(s.xhat.rows(), s.xhat.cols());

    // Block chain: shift within own estimates plus consensus correction;
    // the last block feeds through eta.
    for (int k = 0; k + 1 < m; ++k)
      ds.xhat.col(k) = s.xhat.col(k + 1) + corr[static_cast<std::size_t>(i)].col(k);
    ds.xhat.col(m - 1) = s.eta + corr[static_cast<std::size_t>(i)].col(m - 1);

    // eta loop: disagreement over neighbors' eta plus the local filter pull.
    const double a0 = g.leader_weights(i);
    Eigen::VectorXd e_eta = block_disagreement(i, g, etas, nullptr);
    e_eta += a0 * (s.rho - s.eta);
    ds.eta = gi.kappa_eta * (sig_pow(e_eta, gi.alpha) + signum(e_eta, policy)).eval();

    // Super-twisting filter on the leader's last block; dormant when a0 = 0.
    Eigen::VectorXd innov = leader_x0.col(m - 1) - s.xi_f;
    ds.rho = gi.kappa_rho * a0 * signum(innov, policy);
    ds.xi_f = s.rho + gi.kappa_xi * a0 * sig_pow(innov, 0.5);
  }
}

EstimationErrors estimation_errors(const EstimatorState& est, const Eigen::MatrixXd& x0,
                                   const Eigen::VectorXd& x0m_dot) {
  if (est.xhat.rows() != x0.rows() || est.xhat.cols() != x0.cols())
    throw std::invalid_argument("estimation_errors: dimension mismatch");
  EstimationErrors e;
  e.xtilde = est.xhat - x0;
  e.eta_tilde = est.eta - x0m_dot;
  e.xi_tilde = est.xi_f - x0.col(x0.cols() - 1);
  e.rho_tilde = est.rho - x0m_dot;
  return e;
}

TaskEstimatorState TaskEstimatorState::zero(int dim) {
  TaskEstimatorState s;
  s.chi = Eigen::VectorXd::Zero(dim);
  s.vartheta = Eigen::VectorXd::Zero(dim);
  s.eta = Eigen::VectorXd::Zero(dim);
  s.xi_f = Eigen::VectorXd::Zero(dim);
  s.rho = Eigen::VectorXd::Zero(dim);
  return s;
}

void task_estimator_derivative(const std::vector<TaskEstimatorState>& est,
                               const Eigen::VectorXd& xd, const Eigen::VectorXd& xd_dot,
                               const DirectedLeaderGraph& g,
                               const std::vector<TaskEstimatorGains>& gains,
                               const SignumPolicy& policy,
                               std::vector<TaskEstimatorState>& deriv) {
  check_sizes(est.size(), g, gains.size());
  deriv.resize(est.size());

  std::vector<const Eigen::VectorXd*> chis(est.size()), varthetas(est.size()), etas(est.size());
  for (std::size_t j = 0; j < est.size(); ++j) {
    chis[j] = &est[j].chi;
    varthetas[j] = &est[j].vartheta;
    etas[j] = &est[j].eta;
  }

  for (int i = 0; i < g.n; ++i) {
    const auto& s = est[static_cast<std::size_t>(i)];
    const auto& gi = gains[static_cast<std::size_t>(i)];
    auto& ds = deriv[static_cast<std::size_t>(i)];
    const double a0 = g.leader_weights(i);

    Eigen::VectorXd dis_chi = block_disagreement(i, g, chis, &xd);
    ds.chi = s.vartheta + gi.k_chi * sig_pow(dis_chi, gi.gamma);

    Eigen::VectorXd dis_vt = block_disagreement(i, g, varthetas, &xd_dot);
    ds.vartheta = s.eta + gi.k_vartheta * sig_pow(dis_vt, gi.beta);

    Eigen::VectorXd e_eta = block_disagreement(i, g, etas, nullptr);
    e_eta += a0 * (s.rho - s.eta);
    ds.eta = gi.k_eta * (sig_pow(e_eta, gi.alpha) + signum(e_eta, policy)).eval();

    Eigen::VectorXd innov = xd_dot - s.xi_f;
    ds.rho = gi.k_rho * a0 * signum(innov, policy);
    ds.xi_f = s.rho + gi.k_xi * a0 * sig_pow(innov, 0.5);
  }
}

}  // namespace ftsim
