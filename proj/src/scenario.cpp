#include "ftsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ftsim/expr.hpp"

namespace ftsim {

namespace {

DirectedLeaderGraph ring_with_two_pins() {
  std::vector<std::tuple<int, int, double>> edges;
  for (int i = 1; i <= 6; ++i) edges.emplace_back(i, i % 6 + 1, 1.0);
  return build_graph(edges, {{1, 1.0}, {4, 1.0}}, 6);
}

EstimatorGains paper_estimator_gains() {
  EstimatorGains g;
  g.kappa_k = Eigen::VectorXd::Constant(1, 15.0);
  g.kappa_m = 5.0;
  g.kappa_eta = 8.0;
  g.kappa_xi = 6.0;
  g.kappa_rho = 4.0;
  g.alpha = g.beta = g.gamma = 0.7;
  return g;
}

ControllerGains paper_controller_gains() {
  ControllerGains g;
  g.kbar = Eigen::Vector2d(0.8, 80.0);
  g.k_kappa = 1.0;
  g.Gamma_theta = 10.0 * Eigen::Matrix2d::Identity();
  g.Gamma_eps = Eigen::Matrix2d::Identity();
  g.delta = ControllerGains::exp_delta(0.05);
  return g;
}

double paper_p(int i) { return ((i % 2 == 0) ? 1.0 : -1.0) * 0.1 * i; }

}  // namespace

Scenario paper_5a() {
  Scenario sc;
  sc.name = "paper-5a";
  sc.kind = ScenarioKind::generic_formation;
  sc.graph = ring_with_two_pins();
  sc.policy = SignumPolicy::boundary_layer_mode(1e-3);
  sc.integ = {1e-4, Scheme::explicit_euler, 30.0, 10};

  sc.generic.leader = paper_leader();
  sc.generic.leader_init.resize(2, 2);
  sc.generic.leader_init.col(0) = Eigen::Vector2d(0.0, -2.0);
  sc.generic.leader_init.col(1) = Eigen::Vector2d(1.0, 0.0);

  const double h = std::sqrt(3.0) / 2.0;
  const Eigen::Vector2d offsets[6] = {{-1.0, 0.0}, {-0.5, h},  {0.5, h},
                                      {1.0, 0.0},  {0.5, -h},  {-0.5, -h}};
  const Eigen::Vector2d positions[6] = {{-0.3, -0.5}, {-2.0, -1.6}, {1.0, -3.0},
                                        {0.2, 0.8},   {2.0, -1.5},  {2.5, 1.8}};

  for (int i = 1; i <= 6; ++i) {
    GenericAgent a;
    a.model = paper_second_order(i);
    a.fault = paper_fault_profile();
    a.delta = offsets[i - 1];
    a.x_init = Eigen::MatrixXd::Zero(2, 2);
    a.x_init.col(0) = positions[i - 1];
    a.xhat_init = Eigen::MatrixXd::Zero(2, 2);
    // Seed each estimate at the agent's own output shifted by its formation
    // offset, so the tracking transformation starts at zero and the
    // controller ramps with the estimator transient instead of a step.
    a.xhat_init.col(0) = positions[i - 1] - offsets[i - 1];
    a.est_gains = paper_estimator_gains();
    a.ctrl_gains = paper_controller_gains();
    sc.generic.agents.push_back(std::move(a));
  }
  return sc;
}

Eigen::Vector2d two_link_ik(const Eigen::Vector2d& target, double l1, double l2) {
  const double r2 = target.squaredNorm();
  double c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  c2 = std::clamp(c2, -1.0, 1.0);
  const double q2 = std::acos(c2);
  const double q1 =
      std::atan2(target.y(), target.x()) - std::atan2(l2 * std::sin(q2), l1 + l2 * c2);
  return {q1, q2};
}

Scenario paper_5b() {
  Scenario sc;
  sc.name = "paper-5b";
  sc.kind = ScenarioKind::manipulator_task;
  sc.graph = ring_with_two_pins();
  sc.policy = SignumPolicy::boundary_layer_mode(1e-3);
  sc.integ = {1e-4, Scheme::explicit_euler, 30.0, 10};

  sc.task.xd = [](double t) {
    return Eigen::Vector2d(1.2 + 0.5 * std::sin(0.6 * t), 1.0 + 0.5 * std::cos(0.6 * t));
  };
  sc.task.xd_dot = [](double t) {
    return Eigen::Vector2d(0.3 * std::cos(0.6 * t), -0.3 * std::sin(0.6 * t));
  };
  sc.task.xd_ddot = [](double t) {
    return Eigen::Vector2d(-0.18 * std::sin(0.6 * t), -0.18 * std::cos(0.6 * t));
  };

  const Eigen::Vector2d xd0(1.2, 1.5);
  auto arms = paper_arms();
  for (int i = 1; i <= 6; ++i) {
    TaskRobot r;
    r.arm = arms[static_cast<std::size_t>(i - 1)];
    r.fault = paper_fault_profile();
    const double p = paper_p(i);
    r.g_fn = [p](double t) { return p * (std::cos(t) + 1.2); };
    r.d_fn = [i](double t) {
      const double w1 = M_PI / (10.0 * i), w2 = M_PI / (20.0 * i);
      return Eigen::Vector2d(0.2 * std::sin(w1 * t) + 0.4 * std::sin(w2 * t),
                             0.4 * std::cos(w1 * t) + 0.8 * std::cos(w2 * t));
    };
    // Start each end-effector on a small circle around the reference start.
    const double phase = 2.0 * M_PI * (i - 1) / 6.0;
    const Eigen::Vector2d start = xd0 + 0.3 * Eigen::Vector2d(std::cos(phase), std::sin(phase));
    r.init.q = two_link_ik(start, r.arm.l1, r.arm.l2);
    r.init.qdot.setZero();
    r.a_hat_init = 0.8 * kin_params(r.arm);  // deliberate 20% kinematic error
    r.est_gains = TaskEstimatorGains{};
    r.task_gains.delta = ControllerGains::exp_delta(0.05);
    r.task_gains.grav = r.arm.grav;
    sc.task.robots.push_back(std::move(r));
  }
  return sc;
}

Scenario preset_by_name(const std::string& name) {
  if (name == "paper-5a") return paper_5a();
  if (name == "paper-5b") return paper_5b();
  throw std::invalid_argument("unknown preset '" + name + "' (expected paper-5a or paper-5b)");
}

// ---------------------------------------------------------------------------
// Scenario file parsing
// ---------------------------------------------------------------------------

namespace {

struct Entry {
  std::string section;              // "" for top level
  std::vector<std::string> key;     // whitespace-separated tokens left of '='
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(const Entry& e, const std::string& what) {
  std::ostringstream msg;
  msg << "scenario line " << e.line << " [";
  msg << (e.section.empty() ? "top" : e.section) << "] ";
  for (const auto& k : e.key) msg << k << ' ';
  msg << ": " << what;
  throw std::invalid_argument(msg.str());
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<Entry> tokenize_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario: cannot open " + path);
  std::vector<Entry> entries;
  std::string section, line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("scenario line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("scenario line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    Entry e;
    e.section = section;
    e.line = lineno;
    std::istringstream ks(line.substr(0, eq));
    std::string tok;
    while (ks >> tok) e.key.push_back(tok);
    if (e.key.empty())
      throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": empty key");
    e.value = trim(line.substr(eq + 1));
    entries.push_back(std::move(e));
  }
  return entries;
}

double num(const Entry& e, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(e, "expected a number, got '" + text + "'");
  }
}

std::vector<double> num_list(const Entry& e) {
  std::vector<double> out;
  std::string cleaned = e.value;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream ss(cleaned);
  std::string tok;
  while (ss >> tok) out.push_back(num(e, tok));
  if (out.empty()) fail(e, "expected one or more numbers");
  return out;
}

int agent_index(const Entry& e, const std::string& tok, int n) {
  if (tok == "*") return 0;  // applies to all agents
  int i = static_cast<int>(num(e, tok));
  if (i < 1 || i > n) fail(e, "agent index " + tok + " out of range (n = " + std::to_string(n) + ")");
  return i;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(trim(cur));
      cur.clear();
    } else
      cur += c;
  }
  parts.push_back(trim(cur));
  return parts;
}

FaultSegment parse_segment(const Entry& e) {
  if (e.key.size() != 2) fail(e, "expected 'segment <t_start> = phi_expr | psi_exprs'");
  FaultSegment seg;
  seg.t_start = num(e, e.key[1]);
  auto halves = split_on(e.value, '|');
  if (halves.size() != 2) fail(e, "expected 'phi_expr | psi_expr, psi_expr, ...'");
  TimeFunction phi;
  try {
    phi = parse_time_expr(halves[0]);
  } catch (const std::exception& ex) {
    fail(e, ex.what());
  }
  seg.phi = [phi](double t) { return phi(t); };
  std::vector<TimeFunction> psis;
  for (const auto& part : split_on(halves[1], ',')) {
    try {
      psis.push_back(parse_time_expr(part));
    } catch (const std::exception& ex) {
      fail(e, ex.what());
    }
  }
  seg.psi = [psis](double t) {
    Eigen::VectorXd v(static_cast<int>(psis.size()));
    for (std::size_t j = 0; j < psis.size(); ++j) v(static_cast<int>(j)) = psis[j](t);
    return v;
  };
  return seg;
}

// Graph declaration collected before building.
struct GraphDecl {
  int n = 0;
  std::vector<std::tuple<int, int, double>> edges;
  std::vector<std::pair<int, double>> leader_links;
  bool any = false;
};

}  // namespace

Scenario load_scenario(const std::string& path) {
  auto entries = tokenize_file(path);

  // Pass 1: preset / kind decide the starting point.
  std::string preset, kind_str;
  for (const auto& e : entries) {
    if (!e.section.empty()) continue;
    if (e.key[0] == "preset") preset = e.value;
    if (e.key[0] == "kind") kind_str = e.value;
  }

  Scenario sc;
  if (!preset.empty()) {
    sc = preset_by_name(preset);
  } else {
    if (kind_str.empty())
      throw std::invalid_argument("scenario: either 'preset' or 'kind' must be declared");
    if (kind_str == "generic_formation")
      sc = paper_5a();
    else if (kind_str == "manipulator_task")
      sc = paper_5b();
    else
      throw std::invalid_argument("scenario: unknown kind '" + kind_str + "'");
    sc.name = path;
  }
  if (!kind_str.empty()) {
    ScenarioKind want = kind_str == "manipulator_task" ? ScenarioKind::manipulator_task
                                                       : ScenarioKind::generic_formation;
    if (want != sc.kind) throw std::invalid_argument("scenario: kind conflicts with preset");
  }

  const bool generic = sc.kind == ScenarioKind::generic_formation;
  const int n = sc.n_agents();
  std::vector<char> fault_overridden(static_cast<std::size_t>(n), 0);
  GraphDecl gd;
  double signum_epsilon = sc.policy.epsilon;
  std::string signum_mode = sc.policy.mode == SignumMode::exact ? "exact" : "boundary_layer";

  auto for_agents = [&](const Entry& e, const std::string& tok, auto&& fn) {
    int i = agent_index(e, tok, n);
    if (i == 0)
      for (int k = 1; k <= n; ++k) fn(k);
    else
      fn(i);
  };

  for (const auto& e : entries) {
    const std::string& sec = e.section;
    const std::string& k0 = e.key[0];

    if (sec.empty()) {
      if (k0 == "preset" || k0 == "kind") continue;
      if (k0 == "name")
        sc.name = e.value;
      else if (k0 == "t_end")
        sc.integ.t_end = num(e, e.value);
      else if (k0 == "step")
        sc.integ.step = num(e, e.value);
      else if (k0 == "log_every")
        sc.integ.log_every = static_cast<int>(num(e, e.value));
      else if (k0 == "converge_tol")
        sc.converge_tol = num(e, e.value);
      else if (k0 == "scheme") {
        if (e.value == "euler")
          sc.integ.scheme = Scheme::explicit_euler;
        else if (e.value == "rk4")
          sc.integ.scheme = Scheme::rk4;
        else
          fail(e, "expected euler or rk4");
      } else if (k0 == "signum")
        signum_mode = e.value;
      else if (k0 == "signum_epsilon")
        signum_epsilon = num(e, e.value);
      else
        fail(e, "unknown top-level key");
      continue;
    }

    if (sec == "graph") {
      gd.any = true;
      if (k0 == "n")
        gd.n = static_cast<int>(num(e, e.value));
      else if (k0 == "leader" && e.key.size() == 2)
        gd.leader_links.emplace_back(static_cast<int>(num(e, e.key[1])), num(e, e.value));
      else if (k0 == "edge" && e.key.size() == 3)
        gd.edges.emplace_back(static_cast<int>(num(e, e.key[1])),
                              static_cast<int>(num(e, e.key[2])), num(e, e.value));
      else
        fail(e, "expected 'n', 'leader <i>' or 'edge <i> <j>'");
      continue;
    }

    if (sec == "fault") fail(e, "fault sections are per-agent: use [fault <i>] or [fault *]");

    if (sec.rfind("fault", 0) == 0) {
      auto toks = split_on(sec, ' ');
      if (toks.size() != 2) fail(e, "expected section [fault <i>] or [fault *]");
      if (k0 != "segment") fail(e, "fault sections only hold 'segment' keys");
      FaultSegment seg = parse_segment(e);
      Eigen::VectorXd probe = seg.psi(0.0);
      if (probe.size() != 2) fail(e, "psi must have 2 components");
      for_agents(e, toks[1], [&](int i) {
        auto& profile = generic ? sc.generic.agents[static_cast<std::size_t>(i - 1)].fault
                                : sc.task.robots[static_cast<std::size_t>(i - 1)].fault;
        // The first declared segment replaces the preset schedule.
        if (!fault_overridden[static_cast<std::size_t>(i - 1)]) {
          profile.segments.clear();
          fault_overridden[static_cast<std::size_t>(i - 1)] = true;
        }
        if (!profile.segments.empty() && profile.segments.back().t_start >= seg.t_start)
          fail(e, "segment start times must be strictly increasing");
        profile.segments.push_back(seg);
      });
      continue;
    }

    if (generic) {
      if (sec == "plant") {
        if (k0 == "family") {
          if (e.value != "paper_second_order") fail(e, "unknown plant family");
        } else
          fail(e, "unknown [plant] key");
        continue;
      }
      if (sec == "estimator") {
        for (auto& a : sc.generic.agents) {
          auto& g = a.est_gains;
          if (k0 == "kappa") {
            auto v = num_list(e);
            if (static_cast<int>(v.size()) != a.model.order)
              fail(e, "kappa needs m values (orders 1..m-1 then m)");
            g.kappa_k = Eigen::Map<Eigen::VectorXd>(v.data(), a.model.order - 1);
            g.kappa_m = v.back();
          } else if (k0 == "kappa_eta")
            g.kappa_eta = num(e, e.value);
          else if (k0 == "kappa_xi")
            g.kappa_xi = num(e, e.value);
          else if (k0 == "kappa_rho")
            g.kappa_rho = num(e, e.value);
          else if (k0 == "alpha")
            g.alpha = num(e, e.value);
          else if (k0 == "beta")
            g.beta = num(e, e.value);
          else if (k0 == "gamma")
            g.gamma = num(e, e.value);
          else
            fail(e, "unknown [estimator] key");
        }
        continue;
      }
      if (sec == "controller") {
        for (auto& a : sc.generic.agents) {
          auto& g = a.ctrl_gains;
          if (k0 == "kbar") {
            auto v = num_list(e);
            if (static_cast<int>(v.size()) != a.model.order) fail(e, "kbar needs m values");
            g.kbar = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
          } else if (k0 == "k_kappa")
            g.k_kappa = num(e, e.value);
          else if (k0 == "gamma_theta")
            g.Gamma_theta = num(e, e.value) *
                            Eigen::MatrixXd::Identity(a.model.param_dim, a.model.param_dim);
          else if (k0 == "gamma_eps")
            g.Gamma_eps = num(e, e.value) * Eigen::MatrixXd::Identity(a.model.dim, a.model.dim);
          else if (k0 == "delta0")
            g.delta = ControllerGains::exp_delta(num(e, e.value));
          else
            fail(e, "unknown [controller] key");
        }
        continue;
      }
      if (sec == "formation") {
        if (k0 != "offset" || e.key.size() != 2) fail(e, "expected 'offset <i> = components'");
        auto v = num_list(e);
        for_agents(e, e.key[1], [&](int i) {
          auto& a = sc.generic.agents[static_cast<std::size_t>(i - 1)];
          if (static_cast<int>(v.size()) != a.model.dim)
            fail(e, "offset needs n components (n = " + std::to_string(a.model.dim) + ")");
          a.delta = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
        });
        continue;
      }
      if (sec == "leader") {
        if (k0.size() != 2 || k0[0] != 'x') fail(e, "expected 'x<k> = components'");
        int block = k0[1] - '0';
        auto v = num_list(e);
        if (block < 1 || block > sc.generic.leader.order) fail(e, "block index out of range");
        if (static_cast<int>(v.size()) != sc.generic.leader.dim)
          fail(e, "leader block needs n components");
        sc.generic.leader_init.col(block - 1) =
            Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
        continue;
      }
      if (sec.rfind("initial", 0) == 0) {
        auto toks = split_on(sec, ' ');
        if (toks.size() != 2) fail(e, "expected section [initial <i>]");
        if (k0.size() != 2 || k0[0] != 'x') fail(e, "expected 'x<k> = components'");
        int block = k0[1] - '0';
        auto v = num_list(e);
        for_agents(e, toks[1], [&](int i) {
          auto& a = sc.generic.agents[static_cast<std::size_t>(i - 1)];
          if (block < 1 || block > a.model.order) fail(e, "block index out of range");
          if (static_cast<int>(v.size()) != a.model.dim) fail(e, "block needs n components");
          a.x_init.col(block - 1) =
              Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
          if (block == 1) a.xhat_init.col(0) = a.x_init.col(0);
        });
        continue;
      }
      fail(e, "unknown section for a generic_formation scenario");
    } else {
      if (sec == "arms") {
        if (k0 == "family") {
          if (e.value != "paper_arms") fail(e, "unknown arm family");
        } else if (k0 == "gravity") {
          double gv = num(e, e.value);
          for (auto& r : sc.task.robots) {
            r.arm.grav = gv;
            r.task_gains.grav = gv;
          }
        } else if (k0 == "robot" && e.key.size() == 2) {
          auto v = num_list(e);
          if (v.size() != 8) fail(e, "robot override needs 'm1 m2 I1 I2 l1 l2 lc1 lc2'");
          for_agents(e, e.key[1], [&](int i) {
            auto& a = sc.task.robots[static_cast<std::size_t>(i - 1)].arm;
            a.m1 = v[0]; a.m2 = v[1]; a.I1 = v[2]; a.I2 = v[3];
            a.l1 = v[4]; a.l2 = v[5]; a.lc1 = v[6]; a.lc2 = v[7];
            a.validate();
            auto& r = sc.task.robots[static_cast<std::size_t>(i - 1)];
            r.a_hat_init = 0.8 * kin_params(a);
          });
        } else
          fail(e, "unknown [arms] key");
        continue;
      }
      if (sec == "reference") {
        static const char* names[4] = {"x", "y", "vx", "vy"};
        int which = -1;
        for (int w = 0; w < 4; ++w)
          if (k0 == names[w]) which = w;
        if (which < 0) fail(e, "expected x, y, vx or vy");
        TimeFunction f;
        try {
          f = parse_time_expr(e.value);
        } catch (const std::exception& ex) {
          fail(e, ex.what());
        }
        auto prev_xd = sc.task.xd;
        auto prev_xdd = sc.task.xd_dot;
        if (which == 0)
          sc.task.xd = [f, prev_xd](double t) { return Eigen::Vector2d(f(t), prev_xd(t).y()); };
        else if (which == 1)
          sc.task.xd = [f, prev_xd](double t) { return Eigen::Vector2d(prev_xd(t).x(), f(t)); };
        else if (which == 2)
          sc.task.xd_dot = [f, prev_xdd](double t) {
            return Eigen::Vector2d(f(t), prev_xdd(t).y());
          };
        else
          sc.task.xd_dot = [f, prev_xdd](double t) {
            return Eigen::Vector2d(prev_xdd(t).x(), f(t));
          };
        continue;
      }
      if (sec == "task_estimator") {
        for (auto& r : sc.task.robots) {
          auto& g = r.est_gains;
          if (k0 == "k") {
            auto v = num_list(e);
            if (v.size() != 5) fail(e, "k needs 5 values: k_chi k_vartheta k_eta k_xi k_rho");
            g.k_chi = v[0]; g.k_vartheta = v[1]; g.k_eta = v[2]; g.k_xi = v[3]; g.k_rho = v[4];
          } else if (k0 == "alpha")
            g.alpha = num(e, e.value);
          else if (k0 == "beta")
            g.beta = num(e, e.value);
          else if (k0 == "gamma")
            g.gamma = num(e, e.value);
          else
            fail(e, "unknown [task_estimator] key");
        }
        continue;
      }
      if (sec == "task_controller") {
        for (auto& r : sc.task.robots) {
          auto& g = r.task_gains;
          if (k0 == "alpha_x")
            g.alpha_x = num(e, e.value);
          else if (k0 == "alpha_r")
            g.alpha_r = num(e, e.value);
          else if (k0 == "k_s")
            g.K_s = num(e, e.value) * Eigen::Matrix2d::Identity();
          else if (k0 == "k_kappa")
            g.k_kappa = num(e, e.value);
          else if (k0 == "gamma_theta")
            g.Gamma_theta = num(e, e.value) * Matrix5d::Identity();
          else if (k0 == "gamma_eps")
            g.Gamma_eps = num(e, e.value) * Eigen::Matrix2d::Identity();
          else if (k0 == "lambda")
            g.Lambda = num(e, e.value) * Eigen::Matrix4d::Identity();
          else if (k0 == "delta0")
            g.delta = ControllerGains::exp_delta(num(e, e.value));
          else if (k0 == "use_estimated_task_velocity")
            g.use_estimated_task_velocity = num(e, e.value) != 0.0;
          else if (k0 == "a_hat_scale") {
            double s = num(e, e.value);
            r.a_hat_init = s * kin_params(r.arm);
          } else
            fail(e, "unknown [task_controller] key");
        }
        continue;
      }
      if (sec.rfind("disturbance", 0) == 0) {
        auto toks = split_on(sec, ' ');
        if (toks.size() != 2) fail(e, "expected section [disturbance <i>]");
        if (k0 != "d") fail(e, "expected 'd = expr, expr'");
        auto parts = split_on(e.value, ',');
        if (parts.size() != 2) fail(e, "d needs 2 expressions");
        std::vector<TimeFunction> fs;
        for (auto& part : parts) {
          try {
            fs.push_back(parse_time_expr(part));
          } catch (const std::exception& ex) {
            fail(e, ex.what());
          }
        }
        for_agents(e, toks[1], [&](int i) {
          sc.task.robots[static_cast<std::size_t>(i - 1)].d_fn = [fs](double t) {
            return Eigen::Vector2d(fs[0](t), fs[1](t));
          };
        });
        continue;
      }
      if (sec.rfind("coefficient", 0) == 0) {
        auto toks = split_on(sec, ' ');
        if (toks.size() != 2) fail(e, "expected section [coefficient <i>]");
        if (k0 != "g") fail(e, "expected 'g = expr'");
        TimeFunction f;
        try {
          f = parse_time_expr(e.value);
        } catch (const std::exception& ex) {
          fail(e, ex.what());
        }
        for_agents(e, toks[1], [&](int i) {
          sc.task.robots[static_cast<std::size_t>(i - 1)].g_fn = [f](double t) { return f(t); };
        });
        continue;
      }
      if (sec.rfind("initial", 0) == 0) {
        auto toks = split_on(sec, ' ');
        if (toks.size() != 2) fail(e, "expected section [initial <i>]");
        auto v = num_list(e);
        if (v.size() != 2) fail(e, "expected 2 components");
        for_agents(e, toks[1], [&](int i) {
          auto& r = sc.task.robots[static_cast<std::size_t>(i - 1)];
          if (k0 == "q")
            r.init.q = Eigen::Vector2d(v[0], v[1]);
          else if (k0 == "qdot")
            r.init.qdot = Eigen::Vector2d(v[0], v[1]);
          else
            fail(e, "expected 'q' or 'qdot'");
        });
        continue;
      }
      fail(e, "unknown section for a manipulator_task scenario");
    }
  }

  // Apply graph declaration (replaces the preset topology wholesale).
  if (gd.any) {
    if (gd.n == 0) throw std::invalid_argument("scenario [graph]: 'n' is required");
    if (gd.n != n)
      throw std::invalid_argument("scenario [graph]: n = " + std::to_string(gd.n) +
                                  " does not match the agent count " + std::to_string(n));
    sc.graph = build_graph(gd.edges, gd.leader_links, gd.n);
  }

  sc.policy = signum_mode == "exact" ? SignumPolicy::exact_mode()
                                     : SignumPolicy::boundary_layer_mode(signum_epsilon);
  if (signum_mode != "exact" && signum_mode != "boundary_layer")
    throw std::invalid_argument("scenario: signum must be exact or boundary_layer");

  if (sc.graph.n != sc.n_agents())
    throw std::invalid_argument("scenario: graph size does not match agent count");
  if (!has_leader_spanning_tree(sc.graph))
    throw std::invalid_argument("scenario: graph lacks a leader-rooted spanning tree");
  return sc;
}

}  // namespace ftsim
