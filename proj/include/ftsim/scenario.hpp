#pragma once

// Scenario declaration: which plant family, graph, gains, faults, offsets
// or task reference, initial conditions, and integrator settings make up
// one closed-loop run. Ships two presets; arbitrary scenarios load from a
// sectioned key-value text file (grammar documented in the README).

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

#include "ftsim/controller.hpp"
#include "ftsim/estimator.hpp"
#include "ftsim/graph.hpp"
#include "ftsim/integrate.hpp"
#include "ftsim/manipulator.hpp"
#include "ftsim/plant.hpp"
#include "ftsim/task_controller.hpp"

namespace ftsim {

enum class ScenarioKind { generic_formation, manipulator_task };

struct GenericAgent {
  FollowerModel model;
  FaultProfile fault;
  Eigen::VectorXd delta;      // formation offset on the output block
  Eigen::MatrixXd x_init;     // n x m
  Eigen::MatrixXd xhat_init;  // n x m
  EstimatorGains est_gains;
  ControllerGains ctrl_gains;
};

struct GenericScenario {
  LeaderModel leader;
  Eigen::MatrixXd leader_init;  // n x m
  std::vector<GenericAgent> agents;
};

struct TaskRobot {
  ArmParams arm;
  FaultProfile fault;
  std::function<double(double)> g_fn;             // time-varying torque coefficient
  std::function<Eigen::Vector2d(double)> d_fn;    // external disturbance
  ArmState init;
  Eigen::Vector4d a_hat_init;                     // initial kinematic estimate
  TaskEstimatorGains est_gains;
  TaskGains task_gains;
};

struct TaskScenario {
  std::vector<TaskRobot> robots;
  std::function<Eigen::Vector2d(double)> xd, xd_dot;
  // Optional analytic second derivative, used only for error reporting; the
  // harness falls back to differencing xd_dot when absent.
  std::function<Eigen::Vector2d(double)> xd_ddot;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::generic_formation;
  DirectedLeaderGraph graph;
  SignumPolicy policy = SignumPolicy::boundary_layer_mode(1e-3);
  IntegratorConfig integ;
  double converge_tol = 5e-2;  // final tracking error below this => converged

  GenericScenario generic;  // populated when kind == generic_formation
  TaskScenario task;        // populated when kind == manipulator_task

  int n_agents() const {
    return kind == ScenarioKind::generic_formation ? static_cast<int>(generic.agents.size())
                                                   : static_cast<int>(task.robots.size());
  }
};

// Six second-order planar followers in a hexagonal formation around a
// non-autonomous leader, with the two-phase actuator fault schedule. The
// communication topology is a directed ring over the followers with agents
// 1 and 4 pinned to the leader (an approximation of the reference layout,
// which is only available pictorially).
Scenario paper_5a();

// Six two-link manipulators tracking a task-space circle under faults, with
// a 20% initial kinematic-parameter error.
Scenario paper_5b();

// Resolves "paper-5a" / "paper-5b"; throws on unknown names.
Scenario preset_by_name(const std::string& name);

// Parses and fully validates a scenario file. Errors carry line numbers and
// the offending section/field.
Scenario load_scenario(const std::string& path);

// Two-link inverse kinematics helper used for placing end-effectors near a
// task-space point (elbow-down branch).
Eigen::Vector2d two_link_ik(const Eigen::Vector2d& target, double l1, double l2);

}  // namespace ftsim
