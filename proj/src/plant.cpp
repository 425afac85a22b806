#include "ftsim/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace ftsim {

Eigen::VectorXd apply_fault(const Eigen::VectorXd& u, double t, const FaultProfile& profile) {
  const FaultValue fv = fault_value(t, profile, static_cast<int>(u.size()));
  return fv.phi * u + fv.psi;
}

FaultValue fault_value(double t, const FaultProfile& profile, int dim) {
  const FaultSegment* active = nullptr;
  for (const auto& seg : profile.segments) {
    if (t >= seg.t_start) active = &seg;
  }
  FaultValue fv;
  if (!active) {
    fv.phi = 1.0;
    fv.psi = Eigen::VectorXd::Zero(dim);
  } else {
    fv.phi = active->phi(t);
    fv.psi = active->psi(t);
  }
  return fv;
}

StackedState follower_derivative(const StackedState& x, const Eigen::VectorXd& u_a, double t,
                                 const FollowerModel& model) {
  if (x.rows() != model.dim || x.cols() != model.order)
    throw std::invalid_argument("follower_derivative: state must be dim x order");
  if (u_a.size() != model.dim)
    throw std::invalid_argument("follower_derivative: input dimension mismatch");

  StackedState dx(model.dim, model.order);
  for (int k = 0; k + 1 < model.order; ++k) dx.col(k) = x.col(k + 1);
  dx.col(model.order - 1) =
      model.f(x).transpose() * model.theta + model.g(x) * u_a + model.d(x, t);
  return dx;
}

StackedState leader_derivative(const StackedState& x0, double t, const LeaderModel& model) {
  if (x0.rows() != model.dim || x0.cols() != model.order)
    throw std::invalid_argument("leader_derivative: state must be dim x order");
  StackedState dx(model.dim, model.order);
  for (int k = 0; k + 1 < model.order; ++k) dx.col(k) = x0.col(k + 1);
  dx.col(model.order - 1) = model.input(x0, t);
  return dx;
}

FollowerModel paper_second_order(int i) {
  if (i < 1 || i > 6) throw std::invalid_argument("paper_second_order: agent index must be 1..6");
  FollowerModel m;
  m.order = 2;
  m.dim = 2;
  m.param_dim = 2;
  m.theta = Eigen::Vector2d(0.3 * i, 0.5 * i);
  const double p = ((i % 2 == 0) ? 1.0 : -1.0) * 0.1 * i;
  m.f = [](const StackedState& x) {
    Eigen::Matrix2d f;
    f << -std::sin(x(0, 0)), x(1, 1),
         x(0, 1), -x(1, 0);
    return Eigen::MatrixXd(f);
  };
  m.g = [p](const StackedState& x) {
    return p * std::cos(x.col(0).squaredNorm() + x.col(1).squaredNorm());
  };
  m.d = [](const StackedState& x, double t) {
    Eigen::Vector2d d;
    d << 0.1 * std::sin(x(0, 0) + x(1, 0)) - 0.3 * std::cos(0.3 * t),
         0.2 * std::cos(x(0, 1) * x(1, 1)) + 0.5 * std::sin(0.5 * t);
    return Eigen::VectorXd(d);
  };
  return m;
}

FaultProfile paper_fault_profile() {
  FaultProfile p;
  p.segments.push_back({3.0,
                        [](double t) { return 0.2 * std::sin(t) + 0.4; },
                        [](double t) { return Eigen::VectorXd(Eigen::Vector2d(2.0, 2.0 * std::cos(t))); }});
  p.segments.push_back({6.0,
                        [](double t) { return 0.3 * std::cos(t) + 0.6; },
                        [](double t) { return Eigen::VectorXd(Eigen::Vector2d(std::sin(0.1 * t), 3.0)); }});
  return p;
}

LeaderModel paper_leader() {
  LeaderModel m;
  m.order = 2;
  m.dim = 2;
  m.input = [](const StackedState& x0, double t) {
    Eigen::Vector2d o;
    o << 0.1 * std::cos(0.1 * x0(0, 0) + x0(1, 1)) + 0.8 * std::sin(t),
         0.2 * std::sin(x0(1, 0) + 0.2 * x0(0, 1)) + 0.8 * std::cos(t);
    return Eigen::VectorXd(o);
  };
  return m;
}

}  // namespace ftsim
