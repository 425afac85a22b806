#pragma once

// Follower/leader dynamics and the actuator fault model. A follower is a
// chain of m integrator blocks of dimension n whose last block is
//   xdot_m = f(x)^T theta + g(x) u_a + d(x, t),
// driven through a faulted actuator u_a = phi(t) u + psi(t). The true
// theta, g, d live only here; controllers never read them.

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace ftsim {

// Stacked states are n x m matrices: column k holds the k-th block.
using StackedState = Eigen::MatrixXd;

struct FollowerModel {
  int order = 2;      // m
  int dim = 2;        // n
  int param_dim = 2;  // r
  Eigen::VectorXd theta;
  std::function<Eigen::MatrixXd(const StackedState&)> f;               // r x n
  std::function<double(const StackedState&)> g;                        // nonzero on visited states
  std::function<Eigen::VectorXd(const StackedState&, double)> d;       // n
};

struct LeaderModel {
  int order = 2;
  int dim = 2;
  std::function<Eigen::VectorXd(const StackedState&, double)> input;   // o_{0,m} with u_0 folded in
};

// Piecewise-in-time actuator fault. Healthy (phi = 1, psi = 0) before the
// first segment; segment start times strictly increasing; 0 < phi(t) <= 1.
struct FaultSegment {
  double t_start = 0.0;
  std::function<double(double)> phi;
  std::function<Eigen::VectorXd(double)> psi;
};

struct FaultProfile {
  std::vector<FaultSegment> segments;
};

// u_a = phi(t) u + psi(t) using the segment active at t.
Eigen::VectorXd apply_fault(const Eigen::VectorXd& u, double t, const FaultProfile& profile);

struct FaultValue {
  double phi = 1.0;
  Eigen::VectorXd psi;
};

// The (phi, psi) pair active at time t; healthy values before any segment.
FaultValue fault_value(double t, const FaultProfile& profile, int dim);

// Chain blocks xdot_k = x_{k+1} for k < m; last block per the follower model.
StackedState follower_derivative(const StackedState& x, const Eigen::VectorXd& u_a, double t,
                                 const FollowerModel& model);

StackedState leader_derivative(const StackedState& x0, double t, const LeaderModel& model);

// Built-in second-order planar instantiations used by the shipped
// six-agent scenario: followers i = 1..6 with
//   f_i = [-sin(x1[0]), x2[1]; x2[0], -x1[1]],  theta_i = (0.3 i, 0.5 i),
//   g_i = p_i cos(|x1|^2 + |x2|^2) with p_i = (-1)^i 0.1 i,
// plus the matching state-dependent disturbance.
FollowerModel paper_second_order(int i);

// Two-phase fault schedule shared by all built-in scenarios:
// healthy until t = 3, then (0.2 sin t + 0.4) u + (2, 2 cos t) until t = 6,
// then (0.3 cos t + 0.6) u + (sin 0.1t, 3).
FaultProfile paper_fault_profile();

// Non-autonomous planar leader with bounded input and bounded input rate.
LeaderModel paper_leader();

}  // namespace ftsim
