#include "ftsim/verify.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "ftsim/graph.hpp"
#include "ftsim/manipulator.hpp"
#include "ftsim/primitives.hpp"

namespace ftsim {

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Random graph whose edge set contains a tree rooted at the leader.
DirectedLeaderGraph random_rooted_graph(std::mt19937& rng, int max_n) {
  std::uniform_int_distribution<int> size_dist(1, max_n);
  std::uniform_real_distribution<double> w_dist(1e-3, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = size_dist(rng);

  std::vector<std::tuple<int, int, double>> edges;
  std::vector<std::pair<int, double>> leader_links;
  for (int i = 1; i <= n; ++i) {
    std::uniform_int_distribution<int> parent_dist(0, i - 1);
    int p = parent_dist(rng);
    if (p == 0)
      leader_links.emplace_back(i, w_dist(rng));
    else
      edges.emplace_back(p, i, w_dist(rng));
  }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j || u(rng) > 0.25) continue;
      bool dup = false;
      for (const auto& [f, t, w] : edges)
        if (f == j && t == i) dup = true;
      if (!dup) edges.emplace_back(j, i, w_dist(rng));
    }
  return build_graph(edges, leader_links, n);
}

bool leq_rel(double a, double b, double slack) {
  return a <= b + slack * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

CheckResult check_graph_certificates(int n_graphs, int max_n, unsigned seed) {
  Timer timer;
  std::mt19937 rng(seed);
  CheckResult res;
  res.name = "graph certificates (" + std::to_string(n_graphs) + " random leader-rooted graphs)";
  res.pass = true;
  double worst_residual = 0.0, worst_gap = 0.0;

  for (int g = 0; g < n_graphs && res.pass; ++g) {
    DirectedLeaderGraph graph = random_rooted_graph(rng, max_n);
    if (!has_leader_spanning_tree(graph)) {
      res.pass = false;
      res.detail = "generator produced a non-rooted graph";
      break;
    }
    GraphCertificate cert;
    try {
      cert = certificate(graph);
    } catch (const std::exception& ex) {
      res.pass = false;
      res.detail = std::string("certificate refused: ") + ex.what();
      break;
    }
    double residual =
        (cert.H.transpose() * cert.pi - Eigen::VectorXd::Ones(graph.n)).cwiseAbs().maxCoeff();
    worst_residual = std::max(worst_residual, residual);
    if (residual > 1e-10 || cert.pi.minCoeff() <= 0.0 || cert.lambda_min_Xi <= 0.0) {
      res.pass = false;
      res.detail = "certificate conditions violated";
      break;
    }
    // Independent route: general (non-selfadjoint) eigensolver on Xi.
    Eigen::EigenSolver<Eigen::MatrixXd> es(cert.Xi);
    double lam_indep = es.eigenvalues().real().minCoeff();
    worst_gap = std::max(worst_gap, std::abs(lam_indep - cert.lambda_min_Xi));
    if (lam_indep <= 0.0 ||
        std::abs(lam_indep - cert.lambda_min_Xi) > 1e-8 * std::max(1.0, std::abs(lam_indep))) {
      res.pass = false;
      res.detail = "independent eigensolver disagrees on lambda_min(Xi)";
      break;
    }
  }
  res.seconds = timer.seconds();
  if (res.pass && res.seconds >= 5.0) {
    res.pass = false;
    res.detail = "runtime budget (5 s) exceeded";
  }
  if (res.pass) {
    std::ostringstream d;
    d << "max |H^T pi - 1| = " << worst_residual << ", max eigensolver gap = " << worst_gap;
    res.detail = d.str();
  }
  return res;
}

CheckResult check_reachability_agreement() {
  Timer timer;
  CheckResult res;
  res.name = "spanning-tree check vs. brute-force reachability";
  res.pass = true;
  long tested = 0;

  auto brute_force = [](const DirectedLeaderGraph& g) {
    // Transitive closure over the leader-augmented adjacency.
    const int n = g.n + 1;
    std::vector<std::vector<char>> reach(static_cast<std::size_t>(n),
                                         std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < g.n; ++i) {
      if (g.leader_weights(i) > 0) reach[0][static_cast<std::size_t>(i + 1)] = 1;
      for (int j = 0; j < g.n; ++j)
        if (g.follower_weights(i, j) > 0)
          reach[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(i + 1)] = 1;
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] &&
              reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
            reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    for (int i = 1; i < n; ++i)
      if (!reach[0][static_cast<std::size_t>(i)]) return false;
    return true;
  };

  // Exhaustive over all binary-weight graphs for n = 1..4.
  for (int n = 1; n <= 4 && res.pass; ++n) {
    const int n_pairs = n * (n - 1);
    const int bits = n_pairs + n;
    for (long mask = 0; mask < (1L << bits); ++mask) {
      DirectedLeaderGraph g;
      g.n = n;
      g.follower_weights = Eigen::MatrixXd::Zero(n, n);
      g.leader_weights = Eigen::VectorXd::Zero(n);
      int bit = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          if (mask & (1L << bit)) g.follower_weights(i, j) = 1.0;
          ++bit;
        }
      for (int i = 0; i < n; ++i, ++bit)
        if (mask & (1L << bit)) g.leader_weights(i) = 1.0;
      if (has_leader_spanning_tree(g) != brute_force(g)) {
        res.pass = false;
        res.detail = "disagreement at n = " + std::to_string(n);
        break;
      }
      ++tested;
    }
  }
  // Random binary graphs for n = 5, 6.
  std::mt19937 rng(99);
  std::bernoulli_distribution edge(0.3);
  for (int n = 5; n <= 6 && res.pass; ++n) {
    for (int rep = 0; rep < 20000; ++rep) {
      DirectedLeaderGraph g;
      g.n = n;
      g.follower_weights = Eigen::MatrixXd::Zero(n, n);
      g.leader_weights = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) {
        if (edge(rng)) g.leader_weights(i) = 1.0;
        for (int j = 0; j < n; ++j)
          if (i != j && edge(rng)) g.follower_weights(i, j) = 1.0;
      }
      if (has_leader_spanning_tree(g) != brute_force(g)) {
        res.pass = false;
        res.detail = "disagreement at n = " + std::to_string(n);
        break;
      }
      ++tested;
    }
  }
  res.seconds = timer.seconds();
  if (res.pass) res.detail = std::to_string(tested) + " graphs agree";
  return res;
}

CheckResult check_lemma1_inequality(int n_draws, unsigned seed) {
  Timer timer;
  CheckResult res;
  res.name = "sum-power inequality chain (" + std::to_string(n_draws) + " draws)";
  res.pass = true;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> n_dist(1, 10);
  std::uniform_real_distribution<double> xi_dist(0.0, 5.0);
  std::uniform_real_distribution<double> p_low(1e-3, 1.0), p_high(1.0 + 1e-6, 4.0);
  std::bernoulli_distribution zero_out(0.1), low_branch(0.5);

  for (int d = 0; d < n_draws && res.pass; ++d) {
    const int n = n_dist(rng);
    double sum = 0.0;
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (auto& v : xi) {
      v = zero_out(rng) ? 0.0 : xi_dist(rng);
      sum += v;
    }
    const bool low = low_branch(rng);
    const double p = low ? p_low(rng) : p_high(rng);
    double sum_pow = 0.0;
    for (double v : xi) sum_pow += std::pow(v, p);
    const double lhs = std::pow(sum, p);
    const double scaled = std::pow(static_cast<double>(n), 1.0 - p) * lhs;
    const bool ok = low ? (leq_rel(lhs, sum_pow, 1e-12) && leq_rel(sum_pow, scaled, 1e-12))
                        : (leq_rel(scaled, sum_pow, 1e-12) && leq_rel(sum_pow, lhs, 1e-12));
    if (!ok) {
      res.pass = false;
      res.detail = "violation at draw " + std::to_string(d) + " (p = " + std::to_string(p) + ")";
    }
  }
  res.seconds = timer.seconds();
  if (res.pass) res.detail = "no violations beyond 1e-12 relative slack";
  return res;
}

CheckResult check_lemma3_inequality(int n_draws, unsigned seed) {
  Timer timer;
  CheckResult res;
  res.name = "smoothed-absolute-value bound (" + std::to_string(n_draws) + " draws)";
  res.pass = true;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> xi_dist(-10.0, 10.0);
  std::uniform_real_distribution<double> gm_dist(1e-6, 5.0);
  for (int d = 0; d < n_draws && res.pass; ++d) {
    const double xi = xi_dist(rng), gm = gm_dist(rng);
    const double gap = std::abs(xi) - xi * xi / std::sqrt(xi * xi + gm * gm);
    if (!leq_rel(0.0, gap, 1e-12) || !leq_rel(gap, gm, 1e-12)) {
      res.pass = false;
      res.detail = "violation at draw " + std::to_string(d);
    }
  }
  res.seconds = timer.seconds();
  if (res.pass) res.detail = "no violations beyond 1e-12 relative slack";
  return res;
}

CheckResult check_nussbaum_oscillation() {
  Timer timer;
  CheckResult res;
  res.name = "Nussbaum running-mean oscillation on [0, 6]";
  const double h = 1e-4;
  const long n = 60000;
  double integral = 0.0, prev = nussbaum(0.0);
  double mean_max = -1e300, mean_min = 1e300;
  for (long k = 1; k <= n; ++k) {
    const double kappa = static_cast<double>(k) * h;
    const double cur = nussbaum(kappa);
    integral += 0.5 * (prev + cur) * h;
    prev = cur;
    const double mean = integral / kappa;
    mean_max = std::max(mean_max, mean);
    mean_min = std::min(mean_min, mean);
  }
  res.pass = mean_max > 10.0 && mean_min < -10.0;
  std::ostringstream d;
  d << "running mean reaches " << mean_max << " and " << mean_min;
  res.detail = d.str();
  res.seconds = timer.seconds();
  return res;
}

CheckResult check_manipulator_identities(int samples_per_robot, unsigned seed) {
  Timer timer;
  CheckResult res;
  res.name = "manipulator identity suite (" + std::to_string(samples_per_robot) +
             " samples per robot)";
  res.pass = true;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto arms = paper_arms();
  double worst_p2 = 0.0, worst_p3 = 0.0, worst_p4 = 0.0;
  for (std::size_t robot = 0; robot < arms.size() && res.pass; ++robot) {
    const ArmParams& p = arms[robot];
    const Vector5d theta = theta_vector(p);
    const Eigen::Vector4d a = kin_params(p);
    for (int k = 0; k < samples_per_robot; ++k) {
      ArmState s;
      s.q << angle(rng), angle(rng);
      s.qdot << gauss(rng), gauss(rng);
      const Eigen::Vector2d v(gauss(rng), gauss(rng));
      const Eigen::Vector2d qr_dot(gauss(rng), gauss(rng));
      const Eigen::Vector2d qr_ddot(gauss(rng), gauss(rng));

      const DynamicsMatrices dm = dynamics_matrices(s, p);
      // Inertia symmetry and positive definiteness.
      if (dm.M(0, 1) != dm.M(1, 0) || !(dm.M.trace() > 0.0) || !(dm.M.determinant() > 0.0)) {
        res.pass = false;
        res.detail = "inertia matrix not symmetric positive definite (robot " +
                     std::to_string(robot + 1) + ")";
        break;
      }
      // Skew symmetry of Mdot - 2C with a central-difference Mdot.
      const double hq = 1e-6;
      ArmState sp = s, sm = s;
      sp.q += hq * s.qdot;
      sm.q -= hq * s.qdot;
      const Eigen::Matrix2d Mdot =
          (dynamics_matrices(sp, p).M - dynamics_matrices(sm, p).M) / (2.0 * hq);
      const double skew = std::abs(v.dot((Mdot - 2.0 * dm.C) * v));
      worst_p2 = std::max(worst_p2, skew);
      if (skew > 1e-6) {
        res.pass = false;
        res.detail = "skew-symmetry residual " + std::to_string(skew);
        break;
      }
      // Dynamic regressor identity.
      const Matrix25d Y = dynamic_regressor(s.q, s.qdot, qr_dot, qr_ddot, p.grav);
      const double p3 = (Y * theta - (dm.M * qr_ddot + dm.C * qr_dot + dm.G)).norm();
      worst_p3 = std::max(worst_p3, p3);
      if (p3 > 1e-10) {
        res.pass = false;
        res.detail = "dynamic regressor residual " + std::to_string(p3);
        break;
      }
      // Kinematic regressor identity.
      const double p4 =
          (kinematic_regressor(s.q, s.qdot) * a - jacobian(s.q, p) * s.qdot).norm();
      worst_p4 = std::max(worst_p4, p4);
      if (p4 > 1e-10) {
        res.pass = false;
        res.detail = "kinematic regressor residual " + std::to_string(p4);
        break;
      }
    }
  }
  res.seconds = timer.seconds();
  if (res.pass && res.seconds >= 10.0) {
    res.pass = false;
    res.detail = "runtime budget (10 s) exceeded";
  }
  if (res.pass) {
    std::ostringstream d;
    d << "max residuals: skew " << worst_p2 << ", dynamic " << worst_p3 << ", kinematic "
      << worst_p4;
    res.detail = d.str();
  }
  return res;
}

std::vector<CheckResult> run_all_checks() {
  return {check_graph_certificates(), check_reachability_agreement(), check_lemma1_inequality(),
          check_lemma3_inequality(),  check_nussbaum_oscillation(),   check_manipulator_identities()};
}

}  // namespace ftsim
