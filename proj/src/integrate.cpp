#include "ftsim/integrate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ftsim {

int SimTrace::channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i] == name) return static_cast<int>(i);
  return -1;
}

const std::vector<double>& SimTrace::column(const std::string& name) const {
  int idx = channel_index(name);
  if (idx < 0) throw std::out_of_range("SimTrace: no channel named '" + name + "'");
  return columns[static_cast<std::size_t>(idx)];
}

namespace {

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.step > 0.0) || cfg.step > 1e-2)
    throw std::invalid_argument("IntegratorConfig: step must lie in (0, 1e-2]");
  if (cfg.t_end < cfg.step)
    throw std::invalid_argument("IntegratorConfig: t_end must be >= step");
  if (cfg.log_every < 1)
    throw std::invalid_argument("IntegratorConfig: log_every must be >= 1");
}

int first_nonfinite(const Eigen::VectorXd& x) {
  for (int i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return i;
  return -1;
}

}  // namespace

SimTrace integrate(const Rhs& rhs, const Eigen::VectorXd& x0, const IntegratorConfig& cfg,
                   const std::vector<Probe>& probes, const Guard& guard, const StateNamer& namer) {
  validate(cfg);

  SimTrace trace;
  std::vector<int> probe_offsets;
  int n_channels = 0;
  for (const auto& p : probes) {
    probe_offsets.push_back(n_channels);
    for (const auto& name : p.names) trace.channels.push_back(name);
    n_channels += static_cast<int>(p.names.size());
  }
  trace.columns.assign(n_channels, {});

  Eigen::VectorXd x = x0;
  Eigen::VectorXd k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()), xtmp(x.size());
  std::vector<double> row(n_channels, 0.0);

  const long n_steps = std::llround(cfg.t_end / cfg.step);
  const double h = cfg.step;

  auto record = [&](double t) {
    trace.times.push_back(t);
    for (std::size_t p = 0; p < probes.size(); ++p)
      probes[p].eval(t, x, row.data() + probe_offsets[p]);
    for (int c = 0; c < n_channels; ++c) trace.columns[c].push_back(row[c]);
  };

  auto check_state = [&](double t) -> bool {
    int bad = first_nonfinite(x);
    if (bad >= 0) {
      trace.diverged = true;
      trace.divergence_time = t;
      std::ostringstream msg;
      msg << "non-finite value in " << (namer ? namer(bad) : "state[" + std::to_string(bad) + "]")
          << " at t = " << t;
      trace.divergence_reason = msg.str();
      return false;
    }
    if (guard) {
      std::string why = guard(t, x);
      if (!why.empty()) {
        trace.diverged = true;
        trace.divergence_time = t;
        trace.divergence_reason = why + " at t = " + std::to_string(t);
        return false;
      }
    }
    return true;
  };

  if (!check_state(0.0)) return trace;
  record(0.0);

  for (long step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * h;
    if (cfg.scheme == Scheme::explicit_euler) {
      rhs(t, x, k1);
      x += h * k1;
    } else {
      rhs(t, x, k1);
      xtmp = x + (0.5 * h) * k1;
      rhs(t + 0.5 * h, xtmp, k2);
      xtmp = x + (0.5 * h) * k2;
      rhs(t + 0.5 * h, xtmp, k3);
      xtmp = x + h * k3;
      rhs(t + h, xtmp, k4);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double t_next = static_cast<double>(step + 1) * h;
    if (!check_state(t_next)) return trace;
    if ((step + 1) % cfg.log_every == 0 || step + 1 == n_steps) record(t_next);
  }
  return trace;
}

std::optional<double> settling_time(const std::vector<double>& times,
                                    const std::vector<double>& values, double tol) {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("settling_time: empty or mismatched series");
  std::ptrdiff_t last_violation = -1;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(values.size()); ++i)
    if (values[static_cast<std::size_t>(i)] > tol) last_violation = i;
  if (last_violation < 0) return times.front();
  if (last_violation + 1 >= static_cast<std::ptrdiff_t>(times.size())) return std::nullopt;
  return times[static_cast<std::size_t>(last_violation + 1)];
}

}  // namespace ftsim
