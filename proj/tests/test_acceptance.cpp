// The release gate: every check in the suite must pass. Each check prints one
// line so the run doubles as a human-readable report.
#include <cstdio>

#include "doctest.h"
#include "singvecm/verify.hpp"

TEST_CASE("acceptance suite") {
  const auto results = singvecm::run_acceptance_checks();
  REQUIRE(results.size() == 10);
  for (const auto& res : results) {
    std::printf("[%s] %2d %-36s %s\n", res.pass ? "PASS" : "FAIL", res.id, res.name.c_str(),
                res.detail.c_str());
    std::fflush(stdout);
  }
  for (const auto& res : results) {
    INFO(res.id, " ", res.name, ": ", res.detail);
    CHECK(res.pass);
  }
}
