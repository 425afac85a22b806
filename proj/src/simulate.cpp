#include "ftsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace ftsim {

// ---------------------------------------------------------------------------
// Packing
// ---------------------------------------------------------------------------

GenericPacker::GenericPacker(const GenericScenario& g) {
  leader_rows_ = g.leader.dim;
  leader_cols_ = g.leader.order;
  int off = leader_rows_ * leader_cols_;
  for (const auto& a : g.agents) {
    AgentDims d{a.model.dim, a.model.order, a.model.param_dim, off};
    off += d.n * d.m * 2 + 3 * d.n + d.r + d.n + 1;
    dims_.push_back(d);
  }
  total_ = off;
}

namespace {

void put(Eigen::VectorXd& out, int& pos, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) out(pos++) = m(r, c);
}

void take(const Eigen::VectorXd& in, int& pos, Eigen::Ref<Eigen::MatrixXd> m) {
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) m(r, c) = in(pos++);
}

}  // namespace

void GenericPacker::pack(const Eigen::MatrixXd& leader, const std::vector<Eigen::MatrixXd>& x,
                         const std::vector<EstimatorState>& est,
                         const std::vector<ControllerState>& ctrl, Eigen::VectorXd& out) const {
  out.resize(total_);
  int pos = 0;
  put(out, pos, leader);
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    put(out, pos, x[i]);
    put(out, pos, est[i].xhat);
    put(out, pos, est[i].eta);
    put(out, pos, est[i].xi_f);
    put(out, pos, est[i].rho);
    put(out, pos, ctrl[i].theta_hat);
    put(out, pos, ctrl[i].eps_hat);
    out(pos++) = ctrl[i].kappa;
  }
}

void GenericPacker::unpack(const Eigen::VectorXd& in, Eigen::MatrixXd& leader,
                           std::vector<Eigen::MatrixXd>& x, std::vector<EstimatorState>& est,
                           std::vector<ControllerState>& ctrl) const {
  int pos = 0;
  leader.resize(leader_rows_, leader_cols_);
  take(in, pos, leader);
  x.resize(dims_.size());
  est.resize(dims_.size());
  ctrl.resize(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    x[i].resize(d.n, d.m);
    take(in, pos, x[i]);
    est[i].xhat.resize(d.n, d.m);
    take(in, pos, est[i].xhat);
    est[i].eta.resize(d.n);
    take(in, pos, est[i].eta);
    est[i].xi_f.resize(d.n);
    take(in, pos, est[i].xi_f);
    est[i].rho.resize(d.n);
    take(in, pos, est[i].rho);
    ctrl[i].theta_hat.resize(d.r);
    take(in, pos, ctrl[i].theta_hat);
    ctrl[i].eps_hat.resize(d.n);
    take(in, pos, ctrl[i].eps_hat);
    ctrl[i].kappa = in(pos++);
  }
}

int GenericPacker::kappa_index(int agent) const {
  const auto& d = dims_[static_cast<std::size_t>(agent)];
  return d.offset + d.n * d.m * 2 + 3 * d.n + d.r + d.n;
}

std::string GenericPacker::state_name(int index) const {
  if (index < leader_rows_ * leader_cols_)
    return "leader.x" + std::to_string(index / leader_rows_ + 1) + "[" +
           std::to_string(index % leader_rows_) + "]";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    int rel = index - d.offset;
    if (rel < 0 || (i + 1 < dims_.size() && index >= dims_[i + 1].offset)) continue;
    std::string who = "agent" + std::to_string(i + 1) + ".";
    int nm = d.n * d.m;
    if (rel < nm) return who + "x" + std::to_string(rel / d.n + 1) + "[" + std::to_string(rel % d.n) + "]";
    rel -= nm;
    if (rel < nm)
      return who + "xhat" + std::to_string(rel / d.n + 1) + "[" + std::to_string(rel % d.n) + "]";
    rel -= nm;
    if (rel < d.n) return who + "eta[" + std::to_string(rel) + "]";
    rel -= d.n;
    if (rel < d.n) return who + "xi[" + std::to_string(rel) + "]";
    rel -= d.n;
    if (rel < d.n) return who + "rho[" + std::to_string(rel) + "]";
    rel -= d.n;
    if (rel < d.r) return who + "theta_hat[" + std::to_string(rel) + "]";
    rel -= d.r;
    if (rel < d.n) return who + "eps_hat[" + std::to_string(rel) + "]";
    return who + "kappa";
  }
  return "state[" + std::to_string(index) + "]";
}

void TaskPacker::pack(const std::vector<ArmState>& s, const std::vector<TaskEstimatorState>& est,
                      const std::vector<TaskControllerState>& ctrl, Eigen::VectorXd& out) const {
  out.resize(size());
  int pos = 0;
  for (int i = 0; i < n_; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    put(out, pos, s[idx].q);
    put(out, pos, s[idx].qdot);
    put(out, pos, est[idx].chi);
    put(out, pos, est[idx].vartheta);
    put(out, pos, est[idx].eta);
    put(out, pos, est[idx].xi_f);
    put(out, pos, est[idx].rho);
    put(out, pos, ctrl[idx].theta_hat);
    put(out, pos, ctrl[idx].a_hat);
    put(out, pos, ctrl[idx].eps_hat);
    out(pos++) = ctrl[idx].kappa;
    put(out, pos, ctrl[idx].sx_integral);
  }
}

void TaskPacker::unpack(const Eigen::VectorXd& in, std::vector<ArmState>& s,
                        std::vector<TaskEstimatorState>& est,
                        std::vector<TaskControllerState>& ctrl) const {
  s.resize(static_cast<std::size_t>(n_));
  est.resize(static_cast<std::size_t>(n_));
  ctrl.resize(static_cast<std::size_t>(n_));
  int pos = 0;
  auto take2 = [&](Eigen::VectorXd& v) {
    v.resize(2);
    v(0) = in(pos++);
    v(1) = in(pos++);
  };
  for (int i = 0; i < n_; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    s[idx].q << in(pos), in(pos + 1);
    pos += 2;
    s[idx].qdot << in(pos), in(pos + 1);
    pos += 2;
    take2(est[idx].chi);
    take2(est[idx].vartheta);
    take2(est[idx].eta);
    take2(est[idx].xi_f);
    take2(est[idx].rho);
    for (int j = 0; j < 5; ++j) ctrl[idx].theta_hat(j) = in(pos++);
    for (int j = 0; j < 4; ++j) ctrl[idx].a_hat(j) = in(pos++);
    ctrl[idx].eps_hat << in(pos), in(pos + 1);
    pos += 2;
    ctrl[idx].kappa = in(pos++);
    ctrl[idx].sx_integral << in(pos), in(pos + 1);
    pos += 2;
  }
}

std::string TaskPacker::state_name(int index) const {
  static const char* names[kPerRobot] = {
      "q[0]",          "q[1]",          "qdot[0]",       "qdot[1]",
      "chi[0]",        "chi[1]",        "vartheta[0]",   "vartheta[1]",
      "eta[0]",        "eta[1]",        "xi[0]",         "xi[1]",
      "rho[0]",        "rho[1]",        "theta_hat[0]",  "theta_hat[1]",
      "theta_hat[2]",  "theta_hat[3]",  "theta_hat[4]",  "a_hat[0]",
      "a_hat[1]",      "a_hat[2]",      "a_hat[3]",      "eps_hat[0]",
      "eps_hat[1]",    "kappa",         "sx_integral[0]", "sx_integral[1]"};
  int robot = index / kPerRobot, rel = index % kPerRobot;
  return "robot" + std::to_string(robot + 1) + "." + names[rel];
}

// ---------------------------------------------------------------------------
// Generic formation closed loop
// ---------------------------------------------------------------------------

namespace {

struct GenericWorkspace {
  Eigen::MatrixXd leader;
  std::vector<Eigen::MatrixXd> x;
  std::vector<EstimatorState> est;
  std::vector<ControllerState> ctrl;

  Eigen::MatrixXd leader_dx;
  std::vector<Eigen::MatrixXd> x_dx;
  std::vector<EstimatorState> est_dx;
  std::vector<ControllerState> ctrl_dx;
  std::vector<Eigen::MatrixXd> corr;
  std::vector<BacksteppingResult> bs;
  std::vector<ControlResult> cr;
  std::vector<AdaptationDerivs> ad;
  std::vector<EstimatorGains> est_gains;
};

RunStatus decide_status(const SimTrace& trace, const Metrics& metrics, double tol,
                        const std::string& tracking_suffix) {
  if (trace.diverged) return RunStatus::diverged;
  bool ok = false;
  for (const auto& cm : metrics.error_channels) {
    if (cm.channel.size() < tracking_suffix.size() ||
        cm.channel.compare(cm.channel.size() - tracking_suffix.size(), tracking_suffix.size(),
                           tracking_suffix) != 0)
      continue;
    ok = true;
    if (!(cm.final_value <= tol)) return RunStatus::inconclusive;
  }
  return ok ? RunStatus::converged : RunStatus::inconclusive;
}

RunResult run_generic(const Scenario& sc) {
  const auto& g = sc.generic;
  const int N = static_cast<int>(g.agents.size());
  GenericPacker packer(g);

  auto ws = std::make_shared<GenericWorkspace>();
  ws->est_gains.reserve(static_cast<std::size_t>(N));
  for (const auto& a : g.agents) ws->est_gains.push_back(a.est_gains);
  ws->bs.resize(static_cast<std::size_t>(N));
  ws->cr.resize(static_cast<std::size_t>(N));
  ws->ad.resize(static_cast<std::size_t>(N));

  // Shared evaluation of the full closed loop at (t, state).
  auto eval = [ws, &g, &sc, N](double t, const Eigen::VectorXd& state,
                               const GenericPacker& pk) {
    pk.unpack(state, ws->leader, ws->x, ws->est, ws->ctrl);
    ws->leader_dx = leader_derivative(ws->leader, t, g.leader);
    estimator_derivative(ws->est, ws->leader, sc.graph, ws->est_gains, sc.policy, ws->est_dx,
                         &ws->corr);
    ws->x_dx.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const auto& a = g.agents[idx];
      ws->bs[idx] = backstepping_errors(ws->x[idx], ws->est[idx], a.delta, a.ctrl_gains,
                                        ws->corr[idx]);
      const Eigen::MatrixXd f_val = a.model.f(ws->x[idx]);
      ws->cr[idx] = control_law(ws->bs[idx], f_val, ws->ctrl[idx], a.ctrl_gains, t);
      const Eigen::VectorXd u_a = apply_fault(ws->cr[idx].u, t, a.fault);
      ws->x_dx[idx] = follower_derivative(ws->x[idx], u_a, t, a.model);
      ws->ad[idx] = adaptation_derivatives(ws->bs[idx].ztilde.col(a.model.order - 1),
                                           ws->cr[idx].ubar, f_val, a.ctrl_gains, t);
    }
  };

  ws->ctrl_dx.resize(static_cast<std::size_t>(N));
  Rhs rhs = [ws, eval, packer, N](double t, const Eigen::VectorXd& state, Eigen::VectorXd& dx) {
    eval(t, state, packer);
    for (int i = 0; i < N; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      ws->ctrl_dx[idx].theta_hat = ws->ad[idx].theta_hat_dot;
      ws->ctrl_dx[idx].eps_hat = ws->ad[idx].eps_hat_dot;
      ws->ctrl_dx[idx].kappa = ws->ad[idx].kappa_dot;
    }
    packer.pack(ws->leader_dx, ws->x_dx, ws->est_dx, ws->ctrl_dx, dx);
  };

  // Probes recompute the same closed-loop evaluation at recording instants.
  std::vector<Probe> probes;
  {
    Probe p;
    const int n = g.leader.dim, m = g.leader.order;
    for (int k = 1; k <= m; ++k)
      for (int j = 0; j < n; ++j)
        p.names.push_back("leader.x" + std::to_string(k) + "[" + std::to_string(j) + "]");
    p.eval = [ws, eval, packer](double t, const Eigen::VectorXd& state, double* out) {
      eval(t, state, packer);
      int c = 0;
      for (int k = 0; k < ws->leader.cols(); ++k)
        for (int j = 0; j < ws->leader.rows(); ++j) out[c++] = ws->leader(j, k);
    };
    probes.push_back(std::move(p));
  }
  for (int i = 0; i < N; ++i) {
    Probe p;
    const auto idx = static_cast<std::size_t>(i);
    const auto& a = g.agents[idx];
    const int n = a.model.dim, m = a.model.order, r = a.model.param_dim;
    std::string who = "agent" + std::to_string(i + 1) + ".";
    auto push_vec = [&p, &who](const std::string& base, int len) {
      for (int j = 0; j < len; ++j) p.names.push_back(who + base + "[" + std::to_string(j) + "]");
    };
    for (int k = 1; k <= m; ++k) push_vec("x" + std::to_string(k), n);
    for (int k = 1; k <= m; ++k) push_vec("xhat" + std::to_string(k), n);
    push_vec("eta", n);
    for (int k = 1; k <= m; ++k) p.names.push_back(who + "xtilde" + std::to_string(k) + "_norm");
    p.names.push_back(who + "etatilde_norm");
    p.names.push_back(who + "xitilde_norm");
    p.names.push_back(who + "rhotilde_norm");
    for (int k = 1; k <= m; ++k) push_vec("ztilde" + std::to_string(k), n);
    push_vec("u", n);
    push_vec("ubar", n);
    push_vec("theta_hat", r);
    push_vec("eps_hat", n);
    p.names.push_back(who + "kappa");
    p.names.push_back(who + "form_err_norm");
    p.names.push_back(who + "vel_err_norm");

    p.eval = [ws, eval, packer, i, n, m, r, &g](double t, const Eigen::VectorXd& state,
                                                double* out) {
      eval(t, state, packer);
      const auto idx = static_cast<std::size_t>(i);
      int c = 0;
      const auto& x = ws->x[idx];
      const auto& est = ws->est[idx];
      for (int k = 0; k < m; ++k)
        for (int j = 0; j < n; ++j) out[c++] = x(j, k);
      for (int k = 0; k < m; ++k)
        for (int j = 0; j < n; ++j) out[c++] = est.xhat(j, k);
      for (int j = 0; j < n; ++j) out[c++] = est.eta(j);
      // x0m_dot comes analytically from the leader model (harness side).
      Eigen::VectorXd x0m_dot = ws->leader_dx.col(ws->leader_dx.cols() - 1);
      EstimationErrors err = estimation_errors(est, ws->leader, x0m_dot);
      for (int k = 0; k < m; ++k) out[c++] = err.xtilde.col(k).norm();
      out[c++] = err.eta_tilde.norm();
      out[c++] = err.xi_tilde.norm();
      out[c++] = err.rho_tilde.norm();
      for (int k = 0; k < m; ++k)
        for (int j = 0; j < n; ++j) out[c++] = ws->bs[idx].ztilde(j, k);
      for (int j = 0; j < n; ++j) out[c++] = ws->cr[idx].u(j);
      for (int j = 0; j < n; ++j) out[c++] = ws->cr[idx].ubar(j);
      for (int j = 0; j < r; ++j) out[c++] = ws->ctrl[idx].theta_hat(j);
      for (int j = 0; j < n; ++j) out[c++] = ws->ctrl[idx].eps_hat(j);
      out[c++] = ws->ctrl[idx].kappa;
      out[c++] = (x.col(0) - ws->leader.col(0) - g.agents[idx].delta).norm();
      out[c++] = (x.col(1) - ws->leader.col(1)).norm();
    };
    probes.push_back(std::move(p));
  }

  Guard guard = [packer, N](double, const Eigen::VectorXd& state) -> std::string {
    double mx = state.cwiseAbs().maxCoeff();
    if (mx > 1e8) {
      int at = 0;
      state.cwiseAbs().maxCoeff(&at);
      return "state magnitude exceeded 1e8 (" + packer.state_name(at) + ")";
    }
    for (int i = 0; i < N; ++i)
      if (std::abs(state(packer.kappa_index(i))) > 25.0)
        return "Nussbaum argument exceeded 25 (agent " + std::to_string(i + 1) + ")";
    return {};
  };

  // Initial state.
  std::vector<Eigen::MatrixXd> x0(static_cast<std::size_t>(N));
  std::vector<EstimatorState> est0(static_cast<std::size_t>(N));
  std::vector<ControllerState> ctrl0(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto& a = g.agents[idx];
    x0[idx] = a.x_init;
    est0[idx] = EstimatorState::zero(a.model.dim, a.model.order);
    est0[idx].xhat = a.xhat_init;
    ctrl0[idx].theta_hat = Eigen::VectorXd::Zero(a.model.param_dim);
    ctrl0[idx].eps_hat = Eigen::VectorXd::Zero(a.model.dim);
    ctrl0[idx].kappa = 0.0;
  }
  Eigen::VectorXd state0;
  packer.pack(g.leader_init, x0, est0, ctrl0, state0);

  RunResult result;
  result.trace = integrate(rhs, state0, sc.integ, probes, guard,
                           [packer](int i) { return packer.state_name(i); });
  result.metrics = compute_metrics(result.trace, sc.converge_tol);
  result.status = decide_status(result.trace, result.metrics, sc.converge_tol, "form_err_norm");
  return result;
}

// ---------------------------------------------------------------------------
// Manipulator task closed loop
// ---------------------------------------------------------------------------

struct TaskWorkspace {
  std::vector<ArmState> s;
  std::vector<TaskEstimatorState> est;
  std::vector<TaskControllerState> ctrl;

  std::vector<TaskEstimatorState> est_dx;
  std::vector<ArmState> s_dx;
  std::vector<TaskControllerState> ctrl_dx;
  std::vector<TaskControlEval> ev;
  std::vector<ArmDerivative> arm_dx;
  std::vector<TaskEstimatorGains> est_gains;
  Eigen::VectorXd xd, xd_dot;
};

RunResult run_task(const Scenario& sc) {
  const auto& tk = sc.task;
  const int N = static_cast<int>(tk.robots.size());
  TaskPacker packer(N);

  auto ws = std::make_shared<TaskWorkspace>();
  for (const auto& r : tk.robots) ws->est_gains.push_back(r.est_gains);
  ws->ev.resize(static_cast<std::size_t>(N));
  ws->arm_dx.resize(static_cast<std::size_t>(N));

  auto eval = [ws, &tk, &sc, N](double t, const Eigen::VectorXd& state, const TaskPacker& pk) {
    pk.unpack(state, ws->s, ws->est, ws->ctrl);
    ws->xd = tk.xd(t);
    ws->xd_dot = tk.xd_dot(t);
    task_estimator_derivative(ws->est, ws->xd, ws->xd_dot, sc.graph, ws->est_gains, sc.policy,
                              ws->est_dx);
    for (int i = 0; i < N; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const auto& r = tk.robots[idx];
      TaskLocalSignals sig;
      sig.x = forward_kinematics(ws->s[idx].q, r.arm);
      sig.xdot = jacobian(ws->s[idx].q, r.arm) * ws->s[idx].qdot;
      sig.chi = ws->est[idx].chi;
      sig.vartheta = ws->est[idx].vartheta;
      sig.chi_dot = ws->est_dx[idx].chi;
      sig.vartheta_dot = ws->est_dx[idx].vartheta;
      ws->ev[idx] = task_control_step(ws->s[idx], sig, ws->ctrl[idx], r.task_gains, t);
      ws->arm_dx[idx] =
          arm_derivative(ws->s[idx], ws->ev[idx].ctrl.tau, t, r.arm, r.fault, r.g_fn, r.d_fn);
    }
  };

  ws->s_dx.resize(static_cast<std::size_t>(N));
  ws->ctrl_dx.resize(static_cast<std::size_t>(N));
  Rhs rhs = [ws, eval, packer, N](double t, const Eigen::VectorXd& state, Eigen::VectorXd& dx) {
    eval(t, state, packer);
    for (int i = 0; i < N; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      ws->s_dx[idx].q = ws->arm_dx[idx].qdot;
      ws->s_dx[idx].qdot = ws->arm_dx[idx].qddot;
      ws->ctrl_dx[idx].theta_hat = ws->ev[idx].adapt.theta_hat_dot;
      ws->ctrl_dx[idx].a_hat = ws->ev[idx].adapt.a_hat_dot;
      ws->ctrl_dx[idx].eps_hat = ws->ev[idx].adapt.eps_hat_dot;
      ws->ctrl_dx[idx].kappa = ws->ev[idx].adapt.kappa_dot;
      ws->ctrl_dx[idx].sx_integral = ws->ev[idx].ref.sliding.s_x;
    }
    packer.pack(ws->s_dx, ws->est_dx, ws->ctrl_dx, dx);
  };

  std::vector<Probe> probes;
  {
    Probe p;
    p.names = {"ref.xd[0]", "ref.xd[1]", "ref.xd_dot[0]", "ref.xd_dot[1]"};
    p.eval = [&tk](double t, const Eigen::VectorXd&, double* out) {
      Eigen::Vector2d xd = tk.xd(t), xdd = tk.xd_dot(t);
      out[0] = xd(0);
      out[1] = xd(1);
      out[2] = xdd(0);
      out[3] = xdd(1);
    };
    probes.push_back(std::move(p));
  }
  for (int i = 0; i < N; ++i) {
    Probe p;
    std::string who = "robot" + std::to_string(i + 1) + ".";
    auto push_vec = [&p, &who](const std::string& base, int len) {
      for (int j = 0; j < len; ++j) p.names.push_back(who + base + "[" + std::to_string(j) + "]");
    };
    push_vec("q", 2);
    push_vec("qdot", 2);
    push_vec("x", 2);
    push_vec("xdot", 2);
    push_vec("chi", 2);
    push_vec("vartheta", 2);
    push_vec("eta", 2);
    p.names.push_back(who + "chitilde_norm");
    p.names.push_back(who + "varthetatilde_norm");
    p.names.push_back(who + "etatilde_norm");
    p.names.push_back(who + "xitilde_norm");
    p.names.push_back(who + "rhotilde_norm");
    push_vec("ex", 2);
    push_vec("ev", 2);
    push_vec("sx", 2);
    push_vec("sxint", 2);
    push_vec("s", 2);
    push_vec("tau", 2);
    push_vec("u", 2);
    push_vec("theta_hat", 5);
    push_vec("a_hat", 4);
    push_vec("eps_hat", 2);
    p.names.push_back(who + "kappa");
    p.names.push_back(who + "task_err_norm");
    p.names.push_back(who + "task_vel_err_norm");
    p.names.push_back(who + "eq37_residual");
    p.names.push_back(who + "eq38a_residual");
    p.names.push_back(who + "eq38c_residual");
    p.names.push_back(who + "jreg");

    p.eval = [ws, eval, packer, i, &tk](double t, const Eigen::VectorXd& state, double* out) {
      eval(t, state, packer);
      const auto idx = static_cast<std::size_t>(i);
      const auto& r = tk.robots[idx];
      const auto& ev = ws->ev[idx];
      const auto& cs = ws->ctrl[idx];
      const Eigen::Vector2d x = forward_kinematics(ws->s[idx].q, r.arm);
      const Eigen::Vector2d xdot = jacobian(ws->s[idx].q, r.arm) * ws->s[idx].qdot;
      int c = 0;
      auto put2 = [&](const Eigen::Vector2d& v) {
        out[c++] = v(0);
        out[c++] = v(1);
      };
      put2(ws->s[idx].q);
      put2(ws->s[idx].qdot);
      put2(x);
      put2(xdot);
      put2(ws->est[idx].chi);
      put2(ws->est[idx].vartheta);
      put2(ws->est[idx].eta);
      // Reference-estimate errors; the acceleration reference for eta is the
      // analytic xd second derivative, reconstructed from the xd_dot rate.
      out[c++] = (ws->est[idx].chi - ws->xd).norm();
      out[c++] = (ws->est[idx].vartheta - ws->xd_dot).norm();
      Eigen::Vector2d xd_ddot;
      if (tk.xd_ddot) {
        xd_ddot = tk.xd_ddot(t);
      } else {
        const double h = 1e-6;
        xd_ddot = (tk.xd_dot(t + h) - tk.xd_dot(t - h)) / (2.0 * h);
      }
      out[c++] = (ws->est[idx].eta - xd_ddot).norm();
      out[c++] = (ws->est[idx].xi_f - ws->xd_dot).norm();
      out[c++] = (ws->est[idx].rho - xd_ddot).norm();
      put2(ev.ref.sliding.e_x);
      put2(ev.ref.sliding.e_v);
      put2(ev.ref.sliding.s_x);
      put2(cs.sx_integral);
      put2(ev.ref.s);
      put2(ev.ctrl.tau);
      put2(ev.ctrl.u);
      for (int j = 0; j < 5; ++j) out[c++] = cs.theta_hat(j);
      for (int j = 0; j < 4; ++j) out[c++] = cs.a_hat(j);
      put2(cs.eps_hat);
      out[c++] = cs.kappa;
      out[c++] = (x - ws->xd).norm();
      out[c++] = (xdot - ws->xd_dot).norm();

      // Sliding-relation residual: Jhat s = s_x + alpha_r int(s_x) + Z atilde.
      const Eigen::Vector4d a_true = kin_params(r.arm);
      const Eigen::Vector2d lhs37 = ev.ref.jhat * ev.ref.s;
      const Eigen::Vector2d rhs37 = ev.ref.sliding.s_x + r.task_gains.alpha_r * cs.sx_integral +
                                    ev.ref.Z * (cs.a_hat - a_true);
      out[c++] = (lhs37 - rhs37).norm();
      out[c++] =
          (ev.ref.sliding.s_x - (ev.ref.sliding.e_v + r.task_gains.alpha_x * ev.ref.sliding.e_x))
              .norm();

      // Closed-loop torque relation residual, evaluated with the true
      // parameters (harness side): M sdot = -C s + (b N - 1) u + Y thetatilde
      // - Jhat^T Ks Jhat s + D - diag(sdelta) eps_hat.
      const DynamicsMatrices dm = dynamics_matrices(ws->s[idx], r.arm);
      const Eigen::Vector2d sdot = ws->arm_dx[idx].qddot - ev.ref.qr_ddot;
      const FaultValue fv = fault_value(t, r.fault, 2);
      const double b = r.g_fn(t) * fv.phi;
      const Eigen::Vector2d D =
          r.g_fn(t) * fv.psi + r.d_fn(t) - friction(ws->s[idx].qdot, r.arm);
      const Vector5d theta_tilde = cs.theta_hat - theta_vector(r.arm);
      Eigen::Vector2d sdelta;
      for (int j = 0; j < 2; ++j) {
        double dj = r.task_gains.delta(j, t);
        sdelta(j) = ev.ref.s(j) / std::sqrt(ev.ref.s(j) * ev.ref.s(j) + dj * dj);
      }
      const Eigen::Vector2d lhs38 = dm.M * sdot;
      const Eigen::Vector2d rhs38 =
          -dm.C * ev.ref.s + (b * nussbaum(cs.kappa) - 1.0) * ev.ctrl.u + ev.Y * theta_tilde -
          ev.ref.jhat.transpose() * r.task_gains.K_s * ev.ref.jhat * ev.ref.s + D -
          Eigen::Vector2d(sdelta.asDiagonal() * cs.eps_hat);
      out[c++] = (lhs38 - rhs38).norm();
      out[c++] = ev.ref.pinv_regularized ? 1.0 : 0.0;
    };
    probes.push_back(std::move(p));
  }

  Guard guard = [packer, N](double, const Eigen::VectorXd& state) -> std::string {
    double mx = state.cwiseAbs().maxCoeff();
    if (mx > 1e8) {
      int at = 0;
      state.cwiseAbs().maxCoeff(&at);
      return "state magnitude exceeded 1e8 (" + packer.state_name(at) + ")";
    }
    for (int i = 0; i < N; ++i)
      if (std::abs(state(packer.kappa_index(i))) > 25.0)
        return "Nussbaum argument exceeded 25 (robot " + std::to_string(i + 1) + ")";
    return {};
  };

  std::vector<ArmState> s0(static_cast<std::size_t>(N));
  std::vector<TaskEstimatorState> est0(static_cast<std::size_t>(N));
  std::vector<TaskControllerState> ctrl0(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto& r = tk.robots[idx];
    s0[idx] = r.init;
    est0[idx] = TaskEstimatorState::zero(2);
    est0[idx].chi = forward_kinematics(r.init.q, r.arm);  // seed with own end-effector
    ctrl0[idx] = TaskControllerState{};
    ctrl0[idx].a_hat = r.a_hat_init;
  }
  Eigen::VectorXd state0;
  packer.pack(s0, est0, ctrl0, state0);

  RunResult result;
  result.trace = integrate(rhs, state0, sc.integ, probes, guard,
                           [packer](int i) { return packer.state_name(i); });
  result.metrics = compute_metrics(result.trace, sc.converge_tol);
  result.status = decide_status(result.trace, result.metrics, sc.converge_tol, "task_err_norm");
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

const ChannelMetric* Metrics::find(const std::string& channel) const {
  for (const auto& cm : error_channels)
    if (cm.channel == channel) return &cm;
  return nullptr;
}

Metrics compute_metrics(const SimTrace& trace, double tol) {
  if (trace.empty()) throw std::invalid_argument("compute_metrics: empty trace");
  Metrics m;
  m.tolerance = tol;
  m.diverged = trace.diverged;
  m.divergence_reason = trace.divergence_reason;

  auto is_adaptive = [](const std::string& name) {
    return name.find("theta_hat") != std::string::npos ||
           name.find("eps_hat") != std::string::npos ||
           name.find("a_hat") != std::string::npos ||
           (name.size() >= 5 && name.compare(name.size() - 5, 5, "kappa") == 0);
  };

  for (std::size_t c = 0; c < trace.channels.size(); ++c) {
    const std::string& name = trace.channels[c];
    const auto& col = trace.columns[c];
    if (name.size() >= 5 && name.compare(name.size() - 5, 5, "_norm") == 0) {
      ChannelMetric cm;
      cm.channel = name;
      cm.final_value = col.back();
      cm.max_value = *std::max_element(col.begin(), col.end());
      cm.settling = trace.diverged ? std::nullopt : settling_time(trace.times, col, tol);
      m.error_channels.push_back(std::move(cm));
    } else if (is_adaptive(name)) {
      for (double v : col) m.adaptive_sup = std::max(m.adaptive_sup, std::abs(v));
    }
  }
  return m;
}

RunResult run(const Scenario& scenario) {
  return scenario.kind == ScenarioKind::generic_formation ? run_generic(scenario)
                                                          : run_task(scenario);
}

std::vector<RunResult> run_sweep(const std::vector<Scenario>& scenarios) {
  std::vector<std::future<RunResult>> futures;
  futures.reserve(scenarios.size());
  for (const auto& sc : scenarios)
    futures.push_back(std::async(std::launch::async, [&sc] { return run(sc); }));
  std::vector<RunResult> results;
  results.reserve(scenarios.size());
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

}  // namespace ftsim
