#pragma once

// Numeric property suites runnable from the CLI and the acceptance tests:
// graph certificates on random leader-rooted graphs, the two scalar
// inequality families, the Nussbaum oscillation witness, and the
// manipulator identity checks.

#include <string>
#include <vector>

namespace ftsim {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

CheckResult check_graph_certificates(int n_graphs = 200, int max_n = 8, unsigned seed = 12345);
CheckResult check_reachability_agreement();
CheckResult check_lemma1_inequality(int n_draws = 10000, unsigned seed = 2);
CheckResult check_lemma3_inequality(int n_draws = 10000, unsigned seed = 3);
CheckResult check_nussbaum_oscillation();
CheckResult check_manipulator_identities(int samples_per_robot = 1000, unsigned seed = 4);

// The full battery, in a fixed order.
std::vector<CheckResult> run_all_checks();

}  // namespace ftsim
