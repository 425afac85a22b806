#pragma once

// Directed leader-follower graph: adjacency construction, leader-rooted
// spanning-tree check, and the spectral certificate (H, pi, Xi) that the
// convergence analysis of the distributed estimator rests on.

#include <Eigen/Core>

#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ftsim {

// Followers are 1..n externally, 0..n-1 in the matrices. Node 0 is the
// leader and is not part of follower_weights. follower_weights(i, j) = a_ij
// is the weight agent i places on information received from agent j.
struct DirectedLeaderGraph {
  int n = 0;
  Eigen::MatrixXd follower_weights;  // a_ij, zero diagonal, >= 0
  Eigen::VectorXd leader_weights;    // a_i0 >= 0
};

// H = L + B with L the follower Laplacian and B = diag(a_i0).
// pi solves H^T pi = 1_N; Xi = (Pi H + H^T Pi)/2 with Pi = diag(pi).
// Under a leader-rooted spanning tree, pi > 0 and Xi is positive definite.
struct GraphCertificate {
  Eigen::MatrixXd H;
  Eigen::VectorXd pi;
  Eigen::MatrixXd Xi;
  double lambda_min_Xi = 0.0;
};

// edges are (from, to, weight) triples meaning information flows from -> to;
// leader_links are (follower, weight) pairs for the leader pinning a_i0.
// Indices are 1-based. Rejects out-of-range indices, non-positive weights,
// self-loops, and duplicate entries.
DirectedLeaderGraph build_graph(const std::vector<std::tuple<int, int, double>>& edges,
                                const std::vector<std::pair<int, double>>& leader_links, int n);

// True iff every follower is reachable from the leader along directed edges
// (a leader link counts as an edge 0 -> i).
bool has_leader_spanning_tree(const DirectedLeaderGraph& g);

Eigen::MatrixXd information_matrix(const DirectedLeaderGraph& g);

// Refuses (std::domain_error) when the graph has no leader-rooted spanning
// tree. The H^T pi = 1_N residual is verified to 1e-10 and pi > 0,
// lambda_min(Xi) > 0 are asserted.
GraphCertificate certificate(const DirectedLeaderGraph& g);

// Edge-list text file: one "from to weight" triple per line, '#' comments,
// node 0 reserved for the leader. Node count inferred from the largest index.
DirectedLeaderGraph load_graph_file(const std::string& path);

}  // namespace ftsim
