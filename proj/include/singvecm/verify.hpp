#pragma once

#include <string>
#include <vector>

namespace singvecm {

// One entry of the built-in verification suite. Tolerances and seeds are
// pinned inside the implementation so a run is fully reproducible.
struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values against their thresholds
};

// Runs the ten acceptance checks in order. Never throws: a check that raises
// is reported as failed with the exception message in `detail`.
std::vector<CheckResult> run_acceptance_checks();

}  // namespace singvecm
