#pragma once

// Simulation orchestration: packs plants + estimators + controllers into one
// flat state vector, wires the closed-loop right-hand side, runs the
// integrator, and reduces the trace to metrics.

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "ftsim/integrate.hpp"
#include "ftsim/scenario.hpp"

namespace ftsim {

// Flat layout for the generic formation scenario:
// [leader | per agent: plant, xhat, eta, xi, rho, theta_hat, eps_hat, kappa].
class GenericPacker {
 public:
  explicit GenericPacker(const GenericScenario& g);

  int size() const { return total_; }
  int n_agents() const { return static_cast<int>(dims_.size()); }

  void pack(const Eigen::MatrixXd& leader, const std::vector<Eigen::MatrixXd>& x,
            const std::vector<EstimatorState>& est, const std::vector<ControllerState>& ctrl,
            Eigen::VectorXd& out) const;
  void unpack(const Eigen::VectorXd& in, Eigen::MatrixXd& leader,
              std::vector<Eigen::MatrixXd>& x, std::vector<EstimatorState>& est,
              std::vector<ControllerState>& ctrl) const;

  int kappa_index(int agent) const;
  std::string state_name(int index) const;

 private:
  struct AgentDims {
    int n, m, r, offset;
  };
  int leader_rows_ = 0, leader_cols_ = 0, total_ = 0;
  std::vector<AgentDims> dims_;
};

// Flat layout for the manipulator scenario:
// [per robot: q, qdot, chi, vartheta, eta, xi, rho, theta_hat, a_hat,
//  eps_hat, kappa, sx_integral] (28 states per robot).
class TaskPacker {
 public:
  explicit TaskPacker(int n_robots) : n_(n_robots) {}

  static constexpr int kPerRobot = 28;
  int size() const { return n_ * kPerRobot; }
  int n_agents() const { return n_; }

  void pack(const std::vector<ArmState>& s, const std::vector<TaskEstimatorState>& est,
            const std::vector<TaskControllerState>& ctrl, Eigen::VectorXd& out) const;
  void unpack(const Eigen::VectorXd& in, std::vector<ArmState>& s,
              std::vector<TaskEstimatorState>& est, std::vector<TaskControllerState>& ctrl) const;

  int kappa_index(int robot) const { return robot * kPerRobot + 25; }
  std::string state_name(int index) const;

 private:
  int n_ = 0;
};

enum class RunStatus { converged = 0, diverged = 2, inconclusive = 3 };

struct ChannelMetric {
  std::string channel;
  std::optional<double> settling;
  double final_value = 0.0;
  double max_value = 0.0;
};

struct Metrics {
  double tolerance = 5e-2;
  std::vector<ChannelMetric> error_channels;  // every *_norm channel
  double adaptive_sup = 0.0;                  // sup |.| over adaptive-parameter channels
  bool diverged = false;
  std::string divergence_reason;

  const ChannelMetric* find(const std::string& channel) const;
};

// Settling times (per *_norm channel at the given tolerance), final and max
// values, and the sup-norm of all adaptive parameters.
Metrics compute_metrics(const SimTrace& trace, double tol);

struct RunResult {
  SimTrace trace;
  Metrics metrics;
  RunStatus status = RunStatus::inconclusive;
};

// Deterministic closed-loop run of a scenario. Status: diverged when a guard
// tripped, converged when every tracking-error norm ends below the
// scenario's tolerance, inconclusive otherwise.
RunResult run(const Scenario& scenario);

// Independent scenarios executed concurrently, results in input order.
std::vector<RunResult> run_sweep(const std::vector<Scenario>& scenarios);

}  // namespace ftsim
