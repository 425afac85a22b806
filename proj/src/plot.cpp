#include "ftsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ftsim {

namespace {

constexpr int kWidth = 860, kHeight = 520;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Series {
  std::string label;
  const std::vector<double>* x = nullptr;
  const std::vector<double>* y = nullptr;
  bool start_marker = false;
};

double nice_step(double span) {
  if (span <= 0) return 1.0;
  double raw = span / 6.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

void write_svg(const std::string& path, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x->size(); ++i) {
      double xv = (*s.x)[i], yv = (*s.y)[i];
      if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) {
    ymax = ymin + 1.0;
    ymin -= 1.0;
  }
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto X = [&](double v) {
    return kMarginL + (v - xmin) / (xmax - xmin) * (kWidth - kMarginL - kMarginR);
  };
  auto Y = [&](double v) {
    return kHeight - kMarginB - (v - ymin) / (ymax - ymin) * (kHeight - kMarginT - kMarginB);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_plots: cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << ' ' << kHeight << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << kWidth / 2 << "' y='22' text-anchor='middle' font-size='15' "
         "font-family='sans-serif'>"
      << title << "</text>\n";

  // Axes, ticks and grid.
  out << "<g font-size='11' font-family='sans-serif' fill='#333'>\n";
  double xstep = nice_step(xmax - xmin), ystep = nice_step(ymax - ymin);
  for (double v = std::ceil(xmin / xstep) * xstep; v <= xmax + 1e-12; v += xstep) {
    out << "<line x1='" << X(v) << "' y1='" << kMarginT << "' x2='" << X(v) << "' y2='"
        << kHeight - kMarginB << "' stroke='#e0e0e0'/>\n";
    out << "<text x='" << X(v) << "' y='" << kHeight - kMarginB + 16
        << "' text-anchor='middle'>" << v << "</text>\n";
  }
  for (double v = std::ceil(ymin / ystep) * ystep; v <= ymax + 1e-12; v += ystep) {
    out << "<line x1='" << kMarginL << "' y1='" << Y(v) << "' x2='" << kWidth - kMarginR
        << "' y2='" << Y(v) << "' stroke='#e0e0e0'/>\n";
    out << "<text x='" << kMarginL - 6 << "' y='" << Y(v) + 4 << "' text-anchor='end'>" << v
        << "</text>\n";
  }
  out << "</g>\n";
  out << "<rect x='" << kMarginL << "' y='" << kMarginT << "' width='"
      << kWidth - kMarginL - kMarginR << "' height='" << kHeight - kMarginT - kMarginB
      << "' fill='none' stroke='#333'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-size='12' font-family='sans-serif'>" << xlabel
      << "</text>\n";
  out << "<text x='16' y='" << kHeight / 2
      << "' text-anchor='middle' font-size='12' font-family='sans-serif' transform='rotate(-90 16 "
      << kHeight / 2 << ")'>" << ylabel << "</text>\n";

  // Decimate long series so files stay small.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % 10];
    std::size_t n = s.x->size();
    std::size_t stride = std::max<std::size_t>(1, n / 2000);
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.2' points='";
    for (std::size_t i = 0; i < n; i += stride) {
      double xv = (*s.x)[i], yv = (*s.y)[i];
      if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
      out << X(xv) << ',' << Y(yv) << ' ';
    }
    if (n > 0) out << X((*s.x)[n - 1]) << ',' << Y((*s.y)[n - 1]);
    out << "'/>\n";
    if (s.start_marker && n > 0)
      out << "<circle cx='" << X((*s.x)[0]) << "' cy='" << Y((*s.y)[0])
          << "' r='5' fill='none' stroke='" << color << "' stroke-width='1.5'/>\n";
    // Legend entry.
    double lx = kMarginL + 10, ly = kMarginT + 14 + 14 * static_cast<double>(si);
    out << "<line x1='" << lx << "' y1='" << ly - 4 << "' x2='" << lx + 18 << "' y2='" << ly - 4
        << "' stroke='" << color << "' stroke-width='2'/>\n"
        << "<text x='" << lx + 24 << "' y='" << ly
        << "' font-size='11' font-family='sans-serif'>" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

std::vector<std::string> agent_prefixes(const SimTrace& trace, const std::string& stem) {
  std::vector<std::string> out;
  for (int i = 1; i <= 64; ++i) {
    std::string prefix = stem + std::to_string(i) + ".";
    bool found = false;
    for (const auto& ch : trace.channels)
      if (ch.rfind(prefix, 0) == 0) {
        found = true;
        break;
      }
    if (!found) break;
    out.push_back(prefix);
  }
  return out;
}

}  // namespace

std::vector<std::string> export_plots(const SimTrace& trace, const std::string& dir) {
  if (trace.empty()) throw std::invalid_argument("export_plots: refusing to plot an empty trace");
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;

  const bool task = !agent_prefixes(trace, "robot").empty();
  const auto prefixes = task ? agent_prefixes(trace, "robot") : agent_prefixes(trace, "agent");
  if (prefixes.empty()) throw std::invalid_argument("export_plots: no per-agent channels found");

  auto emit = [&](const std::string& file, const std::string& title, const std::string& xlabel,
                  const std::string& ylabel, const std::vector<Series>& series) {
    std::string path = dir + "/" + file;
    write_svg(path, title, xlabel, ylabel, series);
    written.push_back(path);
  };

  auto norm_series = [&](const std::string& suffix) {
    std::vector<Series> ss;
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      const std::string name = prefixes[i] + suffix;
      if (trace.channel_index(name) < 0) continue;
      ss.push_back({name, &trace.times, &trace.column(name), false});
    }
    return ss;
  };

  if (!task) {
    emit("estimator_errors.svg", "Leader-state estimation errors", "t [s]", "error norm", [&] {
      auto ss = norm_series("xtilde1_norm");
      auto s2 = norm_series("xtilde2_norm");
      ss.insert(ss.end(), s2.begin(), s2.end());
      return ss;
    }());
    {
      // Planar formation trajectory with start markers.
      std::vector<Series> ss;
      for (std::size_t i = 0; i < prefixes.size(); ++i)
        ss.push_back({prefixes[i] + "y", &trace.column(prefixes[i] + "x1[0]"),
                      &trace.column(prefixes[i] + "x1[1]"), true});
      if (trace.channel_index("leader.x1[0]") >= 0)
        ss.push_back({"leader", &trace.column("leader.x1[0]"), &trace.column("leader.x1[1]"),
                      true});
      emit("formation_trajectory.svg", "Formation trajectory (start positions circled)", "y[0]",
           "y[1]", ss);
    }
    emit("tracking_errors.svg", "Formation and velocity tracking errors", "t [s]", "error norm",
         [&] {
           auto ss = norm_series("form_err_norm");
           auto s2 = norm_series("vel_err_norm");
           ss.insert(ss.end(), s2.begin(), s2.end());
           return ss;
         }());
    {
      std::vector<Series> ss;
      for (std::size_t i = 0; i < prefixes.size(); ++i) {
        ss.push_back({prefixes[i] + "kappa", &trace.times, &trace.column(prefixes[i] + "kappa"),
                      false});
        for (int j = 0; j < 2; ++j) {
          std::string n = prefixes[i] + "eps_hat[" + std::to_string(j) + "]";
          if (trace.channel_index(n) >= 0) ss.push_back({n, &trace.times, &trace.column(n), false});
        }
      }
      emit("adaptive_parameters.svg", "Adaptive parameters", "t [s]", "value", ss);
    }
  } else {
    emit("estimation_errors.svg", "Task-reference estimation errors", "t [s]", "error norm", [&] {
      auto ss = norm_series("chitilde_norm");
      auto s2 = norm_series("varthetatilde_norm");
      ss.insert(ss.end(), s2.begin(), s2.end());
      return ss;
    }());
    {
      std::vector<Series> ss;
      for (std::size_t i = 0; i < prefixes.size(); ++i)
        ss.push_back({prefixes[i] + "x", &trace.column(prefixes[i] + "x[0]"),
                      &trace.column(prefixes[i] + "x[1]"), true});
      if (trace.channel_index("ref.xd[0]") >= 0)
        ss.push_back({"reference", &trace.column("ref.xd[0]"), &trace.column("ref.xd[1]"), false});
      emit("end_effector_path.svg", "End-effector paths (start positions circled)", "x", "y", ss);
    }
    emit("tracking_errors.svg", "Task-space tracking errors", "t [s]", "error norm",
         norm_series("task_err_norm"));
    {
      std::vector<Series> ss;
      for (std::size_t i = 0; i < prefixes.size(); ++i) {
        ss.push_back({prefixes[i] + "kappa", &trace.times, &trace.column(prefixes[i] + "kappa"),
                      false});
        for (int j = 0; j < 4; ++j) {
          std::string n = prefixes[i] + "a_hat[" + std::to_string(j) + "]";
          if (trace.channel_index(n) >= 0) ss.push_back({n, &trace.times, &trace.column(n), false});
        }
      }
      emit("adaptive_parameters.svg", "Adaptive parameters", "t [s]", "value", ss);
    }
  }
  return written;
}

}  // namespace ftsim
