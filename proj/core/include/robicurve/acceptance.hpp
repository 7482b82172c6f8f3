#pragma once

#include <string>
#include <vector>

namespace robicurve {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // key numbers, and which sub-check failed if any
};

// Runs every end-to-end acceptance criterion.  Monte Carlo criteria can be
// shortened for interactive runs; the full budget matches the published
// tolerances (3 Monte Carlo standard errors at 10^4 replicates).
std::vector<CriterionResult> run_acceptance_suite(bool full_monte_carlo = true);

}  // namespace robicurve
