#include "ftsim/graph.hpp"

#include <Eigen/Dense>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ftsim {

DirectedLeaderGraph build_graph(const std::vector<std::tuple<int, int, double>>& edges,
                                const std::vector<std::pair<int, double>>& leader_links, int n) {
  if (n < 1) throw std::invalid_argument("build_graph: n must be >= 1");
  DirectedLeaderGraph g;
  g.n = n;
  g.follower_weights = Eigen::MatrixXd::Zero(n, n);
  g.leader_weights = Eigen::VectorXd::Zero(n);

  for (const auto& [from, to, w] : edges) {
    std::ostringstream where;
    where << "edge (" << from << " -> " << to << ")";
    if (from < 1 || from > n || to < 1 || to > n)
      throw std::invalid_argument("build_graph: " + where.str() + ": index out of range 1.." +
                                  std::to_string(n));
    if (from == to) throw std::invalid_argument("build_graph: " + where.str() + ": self-loop");
    if (!(w > 0.0)) throw std::invalid_argument("build_graph: " + where.str() + ": weight must be > 0");
    if (g.follower_weights(to - 1, from - 1) != 0.0)
      throw std::invalid_argument("build_graph: " + where.str() + ": duplicate edge");
    g.follower_weights(to - 1, from - 1) = w;
  }
  for (const auto& [i, w] : leader_links) {
    std::ostringstream where;
    where << "leader link (0 -> " << i << ")";
    if (i < 1 || i > n)
      throw std::invalid_argument("build_graph: " + where.str() + ": index out of range 1.." +
                                  std::to_string(n));
    if (!(w > 0.0)) throw std::invalid_argument("build_graph: " + where.str() + ": weight must be > 0");
    if (g.leader_weights(i - 1) != 0.0)
      throw std::invalid_argument("build_graph: " + where.str() + ": duplicate leader link");
    g.leader_weights(i - 1) = w;
  }
  return g;
}

bool has_leader_spanning_tree(const DirectedLeaderGraph& g) {
  // BFS from the leader over edges 0 -> i (a_i0 > 0) and j -> i (a_ij > 0).
  std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
  std::vector<int> frontier;
  for (int i = 0; i < g.n; ++i)
    if (g.leader_weights(i) > 0.0) {
      seen[static_cast<std::size_t>(i)] = 1;
      frontier.push_back(i);
    }
  while (!frontier.empty()) {
    int j = frontier.back();
    frontier.pop_back();
    for (int i = 0; i < g.n; ++i)
      if (!seen[static_cast<std::size_t>(i)] && g.follower_weights(i, j) > 0.0) {
        seen[static_cast<std::size_t>(i)] = 1;
        frontier.push_back(i);
      }
  }
  for (char s : seen)
    if (!s) return false;
  return true;
}

Eigen::MatrixXd information_matrix(const DirectedLeaderGraph& g) {
  const Eigen::MatrixXd& A = g.follower_weights;
  Eigen::MatrixXd L = Eigen::MatrixXd(A.rowwise().sum().asDiagonal()) - A;
  return L + Eigen::MatrixXd(g.leader_weights.asDiagonal());
}

GraphCertificate certificate(const DirectedLeaderGraph& g) {
  if (!has_leader_spanning_tree(g))
    throw std::domain_error("certificate: graph has no leader-rooted spanning tree");

  GraphCertificate cert;
  cert.H = information_matrix(g);

  // Direct dense solve of H^T pi = 1_N; N stays small, so exactness beats
  // any iterative scheme.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(cert.H.transpose());
  cert.pi = lu.solve(ones);

  double residual = (cert.H.transpose() * cert.pi - ones).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10))
    throw std::logic_error("certificate: H^T pi = 1 residual " + std::to_string(residual) +
                           " exceeds 1e-10");
  if (!(cert.pi.minCoeff() > 0.0))
    throw std::logic_error("certificate: pi has a non-positive component");

  Eigen::MatrixXd PiH = cert.pi.asDiagonal() * cert.H;
  Eigen::MatrixXd Xi = 0.5 * (PiH + PiH.transpose());
  double asym = (Xi - Xi.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9)
    throw std::logic_error("certificate: Xi asymmetry residual exceeds 1e-9");
  cert.Xi = 0.5 * (Xi + Xi.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.Xi, Eigen::EigenvaluesOnly);
  cert.lambda_min_Xi = es.eigenvalues().minCoeff();
  if (!(cert.lambda_min_Xi > 0.0))
    throw std::logic_error("certificate: lambda_min(Xi) is not positive");
  return cert;
}

DirectedLeaderGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_graph_file: cannot open " + path);

  std::vector<std::tuple<int, int, double>> edges;
  std::vector<std::pair<int, double>> leader_links;
  int n = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int from, to;
    double w;
    if (!(ss >> from)) continue;  // blank line
    if (!(ss >> to >> w))
      throw std::runtime_error("load_graph_file: " + path + ":" + std::to_string(lineno) +
                               ": expected 'from to weight'");
    if (to < 1 || from < 0)
      throw std::runtime_error("load_graph_file: " + path + ":" + std::to_string(lineno) +
                               ": node indices must be >= 0 with 0 reserved for the leader");
    n = std::max({n, from, to});
    if (from == 0)
      leader_links.emplace_back(to, w);
    else
      edges.emplace_back(from, to, w);
  }
  if (n == 0) throw std::runtime_error("load_graph_file: " + path + ": no edges found");
  return build_graph(edges, leader_links, n);
}

}  // namespace ftsim
