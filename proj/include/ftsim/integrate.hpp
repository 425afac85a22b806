#pragma once

// Fixed-step explicit integration over a flat state vector, with probe-based
// trace recording, divergence guards, and settling-time detection on the
// recorded series.

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ftsim {

enum class Scheme { explicit_euler, rk4 };

struct IntegratorConfig {
  double step = 1e-4;
  Scheme scheme = Scheme::explicit_euler;
  double t_end = 30.0;
  int log_every = 10;  // record every log_every-th step (plus t = 0 and t_end)
};

// Time-indexed log shared by the whole pipeline: one time axis, named
// columns. A diverged run keeps the partial trace up to the cut index.
struct SimTrace {
  std::vector<double> times;
  std::vector<std::string> channels;
  std::vector<std::vector<double>> columns;  // columns[c][sample]

  bool diverged = false;
  double divergence_time = 0.0;
  std::string divergence_reason;

  std::size_t n_samples() const { return times.size(); }
  bool empty() const { return times.empty(); }
  int channel_index(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
};

// A probe turns the raw state into named trace channels. Probes run only at
// recording instants, so they may recompute controller internals.
struct Probe {
  std::vector<std::string> names;
  std::function<void(double t, const Eigen::VectorXd& x, double* out)> eval;
};

using Rhs = std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx)>;

// Optional scenario-specific guard; returns a divergence reason or empty.
using Guard = std::function<std::string(double t, const Eigen::VectorXd& x)>;

// Maps a state index to a signal name for divergence reports.
using StateNamer = std::function<std::string(int)>;

// Fixed-step explicit integration of dx/dt = rhs(t, x). Deterministic given
// identical inputs. Aborts (marking the trace diverged) on the first
// non-finite state component, naming the offending signal and time.
SimTrace integrate(const Rhs& rhs, const Eigen::VectorXd& x0, const IntegratorConfig& cfg,
                   const std::vector<Probe>& probes, const Guard& guard = {},
                   const StateNamer& namer = {});

// Smallest recorded time t* such that value <= tol for every sample at or
// after t*; absent if the last sample still violates the tolerance.
std::optional<double> settling_time(const std::vector<double>& times,
                                    const std::vector<double>& values, double tol);

}  // namespace ftsim
