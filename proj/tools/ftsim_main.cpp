// Command-line surface: run scenarios or presets, certify graphs, compute
// metrics on saved traces, emit plots, and run the numeric property suites.
// Every subcommand is a thin delegation to the library.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ftsim/graph.hpp"
#include "ftsim/plot.hpp"
#include "ftsim/scenario.hpp"
#include "ftsim/simulate.hpp"
#include "ftsim/trace_io.hpp"
#include "ftsim/verify.hpp"

namespace {

namespace fs = std::filesystem;

void print_metrics(const ftsim::Metrics& m, std::ostream& out) {
  out << "tolerance: " << m.tolerance << "\n";
  if (m.diverged) out << "DIVERGED: " << m.divergence_reason << "\n";
  out << "adaptive parameter sup-norm: " << m.adaptive_sup << "\n";
  for (const auto& cm : m.error_channels) {
    out << cm.channel << ": final = " << cm.final_value << ", max = " << cm.max_value
        << ", settling = ";
    if (cm.settling)
      out << *cm.settling << " s";
    else
      out << "never";
    out << "\n";
  }
}

void ensure_writable(const fs::path& p, bool force) {
  if (fs::exists(p) && !force)
    throw std::runtime_error(p.string() + " exists; pass --force to overwrite");
}

int write_outputs(const ftsim::RunResult& result, const std::string& out_dir, bool force) {
  fs::create_directories(out_dir);
  fs::path trace_path = fs::path(out_dir) / "trace.csv";
  fs::path metrics_path = fs::path(out_dir) / "metrics.txt";
  ensure_writable(trace_path, force);
  ensure_writable(metrics_path, force);
  ftsim::export_csv(result.trace, trace_path.string());
  std::ofstream mf(metrics_path);
  print_metrics(result.metrics, mf);
  ftsim::export_plots(result.trace, (fs::path(out_dir) / "plots").string());
  std::cout << "wrote " << trace_path.string() << ", " << metrics_path.string() << ", plots/\n";
  return 0;
}

const char* status_label(ftsim::RunStatus s) {
  switch (s) {
    case ftsim::RunStatus::converged: return "converged";
    case ftsim::RunStatus::diverged: return "diverged";
    default: return "inconclusive";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed fault-tolerant formation tracking simulator"};
  app.require_subcommand(1);

  // run ----------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "run a preset or scenario file");
  std::string preset;
  std::vector<std::string> scenario_files;
  double t_end = -1.0, step = -1.0;
  std::string out_dir;
  bool force = false, full_rate = false, sweep = false;
  int seed = 0;
  run_cmd->add_option("--preset", preset, "built-in scenario: paper-5a or paper-5b");
  run_cmd->add_option("--scenario", scenario_files, "scenario file(s)");
  run_cmd->add_option("--t-end", t_end, "override simulation horizon [s]");
  run_cmd->add_option("--step", step, "override integrator step [s]");
  run_cmd->add_option("--out", out_dir, "output directory (trace.csv, metrics.txt, plots/)");
  run_cmd->add_flag("--force", force, "overwrite existing outputs");
  run_cmd->add_flag("--full-rate", full_rate, "log every integration step");
  run_cmd->add_flag("--sweep", sweep, "run multiple scenario files concurrently");
  run_cmd->add_option("--seed", seed,
                      "accepted and ignored (the simulator has no stochastic elements)");

  // certify-graph -------------------------------------------------------
  auto* cert_cmd = app.add_subcommand("certify-graph", "print H, pi, lambda_min(Xi) for a graph");
  std::string graph_file;
  cert_cmd->add_option("file", graph_file, "edge-list file (from to weight; 0 = leader)")
      ->required();

  // metrics --------------------------------------------------------------
  auto* metrics_cmd = app.add_subcommand("metrics", "settling times and bounds from a trace CSV");
  std::string metrics_trace;
  double metrics_tol = 5e-2;
  metrics_cmd->add_option("trace", metrics_trace, "trace CSV")->required();
  metrics_cmd->add_option("--tol", metrics_tol, "settling tolerance");

  // plot ------------------------------------------------------------------
  auto* plot_cmd = app.add_subcommand("plot", "emit SVG figures from a trace CSV");
  std::string plot_trace, plot_out = "plots";
  bool plot_force = false;
  plot_cmd->add_option("trace", plot_trace, "trace CSV")->required();
  plot_cmd->add_option("--out", plot_out, "output directory");
  plot_cmd->add_flag("--force", plot_force, "overwrite existing figures");

  // verify ------------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "run the numeric property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 64;
  }

  try {
    if (*run_cmd) {
      if (preset.empty() == scenario_files.empty()) {
        std::cerr << "run: exactly one of --preset or --scenario is required\n";
        return 64;
      }
      std::vector<ftsim::Scenario> scenarios;
      if (!preset.empty())
        scenarios.push_back(ftsim::preset_by_name(preset));
      else
        for (const auto& f : scenario_files) scenarios.push_back(ftsim::load_scenario(f));
      if (scenarios.size() > 1 && !sweep) {
        std::cerr << "run: multiple scenario files require --sweep\n";
        return 64;
      }
      for (auto& sc : scenarios) {
        if (t_end > 0) sc.integ.t_end = t_end;
        if (step > 0) sc.integ.step = step;
        if (full_rate) sc.integ.log_every = 1;
      }

      std::vector<ftsim::RunResult> results =
          sweep ? ftsim::run_sweep(scenarios) : std::vector<ftsim::RunResult>{ftsim::run(scenarios[0])};

      int worst = 0;
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        std::cout << scenarios[i].name << ": " << status_label(r.status) << "\n";
        print_metrics(r.metrics, std::cout);
        if (!out_dir.empty()) {
          std::string dir = results.size() == 1
                                ? out_dir
                                : (fs::path(out_dir) / scenarios[i].name).string();
          write_outputs(r, dir, force);
        }
        worst = std::max(worst, static_cast<int>(r.status));
      }
      return worst;
    }

    if (*cert_cmd) {
      auto g = ftsim::load_graph_file(graph_file);
      if (!ftsim::has_leader_spanning_tree(g)) {
        std::cerr << "graph has no leader-rooted spanning tree; certificate refused\n";
        return 1;
      }
      auto cert = ftsim::certificate(g);
      std::cout << "H =\n" << cert.H << "\npi = " << cert.pi.transpose()
                << "\nlambda_min(Xi) = " << cert.lambda_min_Xi << "\n";
      return 0;
    }

    if (*metrics_cmd) {
      auto trace = ftsim::read_csv(metrics_trace);
      print_metrics(ftsim::compute_metrics(trace, metrics_tol), std::cout);
      return 0;
    }

    if (*plot_cmd) {
      auto trace = ftsim::read_csv(plot_trace);
      if (fs::exists(plot_out) && !fs::is_empty(plot_out) && !plot_force)
        throw std::runtime_error(plot_out + " is not empty; pass --force to overwrite");
      for (const auto& p : ftsim::export_plots(trace, plot_out)) std::cout << "wrote " << p << "\n";
      return 0;
    }

    if (*verify_cmd) {
      bool all = true;
      for (const auto& c : ftsim::run_all_checks()) {
        std::printf("[%s] %s (%.2f s): %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.seconds,
                    c.detail.c_str());
        all = all && c.pass;
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
