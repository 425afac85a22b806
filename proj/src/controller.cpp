#include "ftsim/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace ftsim {

Eigen::VectorXd smoothed_sign(const Eigen::VectorXd& v,
                              const std::function<double(int, double)>& delta, double t) {
  Eigen::VectorXd out(v.size());
  for (int j = 0; j < v.size(); ++j) {
    double dj = delta(j, t);
    out(j) = v(j) / std::sqrt(v(j) * v(j) + dj * dj);
  }
  return out;
}

BacksteppingResult backstepping_errors(const Eigen::MatrixXd& x, const EstimatorState& est,
                                       const Eigen::VectorXd& delta_i, const ControllerGains& gains,
                                       const Eigen::MatrixXd& est_corrections) {
  const int n = static_cast<int>(x.rows());
  const int m = static_cast<int>(x.cols());
  if (m < 2) throw std::invalid_argument("backstepping_errors: order m must be >= 2");
  if (gains.kbar.size() != m)
    throw std::invalid_argument("backstepping_errors: kbar must have m entries");
  if (est.xhat.rows() != n || est.xhat.cols() != m || est_corrections.rows() != n ||
      est_corrections.cols() != m || delta_i.size() != n)
    throw std::invalid_argument("backstepping_errors: dimension mismatch");

  // Raw tracking errors against the local estimates; the first block also
  // subtracts the formation offset.
  Eigen::MatrixXd z = x - est.xhat;
  z.col(0) -= delta_i;

  // zdot_k = z_{k+1} - correction_k for k < m: the estimator's consensus
  // corrections are locally known, so the error derivatives are exact.
  BacksteppingResult r;
  r.ztilde.resize(n, m);
  r.zstar = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd ztilde_dot(n, m);  // columns 0..m-2 used

  r.ztilde.col(0) = z.col(0);
  ztilde_dot.col(0) = z.col(1) - est_corrections.col(0);
  r.zstar.col(1) = -gains.kbar(0) * r.ztilde.col(0);
  Eigen::VectorXd zstar_dot = -gains.kbar(0) * ztilde_dot.col(0);  // derivative of z*_{q}

  for (int q = 2; q < m; ++q) {
    // 1-based step q: refine column q-1 and emit the next virtual control.
    r.ztilde.col(q - 1) = z.col(q - 1) - r.zstar.col(q - 1);
    r.zstar.col(q) = -gains.kbar(q - 1) * r.ztilde.col(q - 1) - r.ztilde.col(q - 2) + zstar_dot;
    ztilde_dot.col(q - 1) = z.col(q) - est_corrections.col(q - 1) - zstar_dot;
    zstar_dot.setZero();
    for (int s = 0; s < q; ++s) zstar_dot -= gains.kbar(s) * ztilde_dot.col(s);
  }

  r.ztilde.col(m - 1) = z.col(m - 1) - r.zstar.col(m - 1);
  r.zstar_dot_m = zstar_dot;
  return r;
}

ControlResult control_law(const BacksteppingResult& bs, const Eigen::MatrixXd& f_val,
                          const ControllerState& cs, const ControllerGains& gains, double t) {
  const int m = static_cast<int>(bs.ztilde.cols());
  const Eigen::VectorXd ztilde_m = bs.ztilde.col(m - 1);
  Eigen::VectorXd zdelta = smoothed_sign(ztilde_m, gains.delta, t);

  ControlResult r;
  r.ubar = gains.kbar(m - 1) * ztilde_m + bs.ztilde.col(m - 2) - bs.zstar_dot_m +
           f_val.transpose() * cs.theta_hat + zdelta.asDiagonal() * cs.eps_hat;
  r.u = nussbaum(cs.kappa) * r.ubar;
  return r;
}

AdaptationDerivs adaptation_derivatives(const Eigen::VectorXd& ztilde_m,
                                        const Eigen::VectorXd& ubar, const Eigen::MatrixXd& f_val,
                                        const ControllerGains& gains, double t) {
  Eigen::VectorXd zdelta = smoothed_sign(ztilde_m, gains.delta, t);
  AdaptationDerivs d;
  d.eps_hat_dot = gains.Gamma_eps * (zdelta.asDiagonal() * ztilde_m);
  d.theta_hat_dot = gains.Gamma_theta * (f_val * ztilde_m);
  d.kappa_dot = gains.k_kappa * ztilde_m.dot(ubar);
  return d;
}

}  // namespace ftsim
