#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "singvecm/errors.hpp"
#include "singvecm/model.hpp"
#include "singvecm/montecarlo.hpp"
#include "singvecm/simulate.hpp"

using namespace singvecm;
using Eigen::MatrixXd;

namespace {

IrfSet truth_irf(unsigned long long seed, int horizon) {
  const DgpDraw draw = draw_dgp(seed);
  auto [spec, rep] = dgp_to_spec(draw);
  return theoretical_irf(spec, horizon);
}

McConfig small_config() {
  McConfig cfg;
  cfg.T_list = {100};
  cfg.lags_report = {0, 4, 20};
  cfg.replications = 3;
  cfg.seed = 9;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("error aggregation closed forms") {
  const IrfSet truth = truth_irf(12, 20);

  // Estimates equal to the truth give exactly zero.
  const std::vector<IrfSet> exact(4, truth);
  CHECK(rmse_at_lag(exact, truth, 0) == 0.0);
  CHECK(rmse_at_lag(exact, truth, 20) == 0.0);

  // A single replication with a single entry off by delta: delta / sqrt(r q).
  const double delta = 0.3;
  IrfSet off = truth;
  off.level_coeffs[5](2, 1) += delta;
  const double got = rmse_at_lag({off}, truth, 5);
  CHECK(std::abs(got - delta / std::sqrt(12.0)) < 1e-14);

  // Same deviation diluted over two replications: delta / sqrt(2 r q).
  const double got2 = rmse_at_lag({off, truth}, truth, 5);
  CHECK(std::abs(got2 - delta / std::sqrt(24.0)) < 1e-14);

  // Untouched lags are unaffected.
  CHECK(rmse_at_lag({off}, truth, 4) == 0.0);

  CHECK_THROWS_AS(rmse_at_lag({}, truth, 0), ConfigError);
  CHECK_THROWS_AS(rmse_at_lag(exact, truth, 21), ConfigError);
  IrfSet misshapen = truth;
  misshapen.level_coeffs[0] = MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(rmse_at_lag({misshapen}, truth, 0), ConfigError);
}

TEST_CASE("truth injection yields a zero table") {
  const McConfig cfg = small_config();
  const EstimateOverride inject = [](const IrfSet& truth, int, int, Estimator) { return truth; };
  const McTable table = run_experiment(cfg, inject);

  CHECK(table.config_digest == cfg.digest());
  REQUIRE(table.entries.size() == cfg.lags_report.size() * cfg.estimators.size());
  for (const McEntry& e : table.entries) {
    CHECK(e.rmse == 0.0);
    CHECK(e.n_reps == cfg.replications);
    CHECK(e.n_failures == 0);
  }
  // Every configured key is present through the lookup.
  for (const int lag : cfg.lags_report) {
    for (const Estimator est : cfg.estimators) {
      CHECK(table.rmse(100, lag, est) == 0.0);
    }
  }
  CHECK_THROWS_AS(table.rmse(100, 13, Estimator::Vecm), std::out_of_range);
  CHECK_THROWS_AS(table.rmse(500, 0, Estimator::Vecm), std::out_of_range);
}

TEST_CASE("config validation") {
  McConfig cfg = small_config();
  cfg.r = 5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.replications = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.lags_report = {};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.lags_report = {0, -1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.T_list = {10};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.estimators = {};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  // The digest distinguishes configurations.
  McConfig a = small_config();
  McConfig b = small_config();
  b.seed = 10;
  CHECK(a.digest() != b.digest());
  McConfig c = small_config();
  c.redraw_dgp_per_run = true;
  CHECK(a.digest() != c.digest());
}

TEST_CASE("experiment is deterministic and thread-count invariant") {
  McConfig cfg;
  cfg.T_list = {120};
  cfg.lags_report = {0, 10, 40};
  cfg.replications = 8;
  cfg.seed = 31;
  cfg.threads = 1;
  const McTable one = run_experiment(cfg);
  cfg.threads = 4;
  const McTable four = run_experiment(cfg);
  cfg.threads = 3;
  const McTable three = run_experiment(cfg);

  REQUIRE(one.entries.size() == four.entries.size());
  REQUIRE(one.entries.size() == three.entries.size());
  for (std::size_t i = 0; i < one.entries.size(); ++i) {
    CHECK(one.entries[i].rmse == four.entries[i].rmse);  // bitwise, not approximate
    CHECK(one.entries[i].rmse == three.entries[i].rmse);
    CHECK(one.entries[i].T == four.entries[i].T);
    CHECK(one.entries[i].lag == four.entries[i].lag);
    CHECK(one.entries[i].n_failures == 0);
    CHECK(one.entries[i].rmse > 0.0);
  }

  // A different seed changes the numbers.
  cfg.seed = 32;
  cfg.threads = 1;
  const McTable other = run_experiment(cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < one.entries.size(); ++i) {
    if (one.entries[i].rmse != other.entries[i].rmse) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("failed replications are counted, redrawn, and capped") {
  McConfig cfg = small_config();
  cfg.replications = 120;  // failure budget: two redraws

  // One transient failure: first call for replication 2 under the levels fit.
  std::map<int, int> calls;
  const EstimateOverride flaky = [&calls](const IrfSet& truth, int, int rep, Estimator est) {
    if (rep == 2 && est == Estimator::Lvar && calls[rep]++ == 0) {
      throw InsufficientData("synthetic transient failure");
    }
    return truth;
  };
  std::vector<std::string> warnings;
  set_warn_hook([&warnings](const std::string& msg) { warnings.push_back(msg); });
  const McTable table = run_experiment(cfg, flaky);
  set_warn_hook(nullptr);

  CHECK(table.rmse(100, 0, Estimator::Lvar) == 0.0);
  CHECK(table.rmse(100, 0, Estimator::Vecm) == 0.0);
  int lvar_failures = 0;
  for (const McEntry& e : table.entries) {
    if (e.estimator == Estimator::Lvar) lvar_failures = e.n_failures;
  }
  CHECK(lvar_failures == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("replication 2") != std::string::npos);

  // Unrecoverable failures exhaust the budget and abort.
  const EstimateOverride broken = [](const IrfSet&, int, int, Estimator) -> IrfSet {
    throw InsufficientData("synthetic permanent failure");
  };
  set_warn_hook([](const std::string&) {});
  CHECK_THROWS_AS(run_experiment(cfg, broken), std::runtime_error);
  set_warn_hook(nullptr);
}

TEST_CASE("redrawing the system per replication still runs deterministically") {
  McConfig cfg;
  cfg.T_list = {120};
  cfg.lags_report = {0, 10};
  cfg.replications = 4;
  cfg.seed = 17;
  cfg.threads = 2;
  cfg.redraw_dgp_per_run = true;
  const McTable a = run_experiment(cfg);
  const McTable b = run_experiment(cfg);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].rmse == b.entries[i].rmse);
    CHECK(a.entries[i].rmse > 0.0);
  }

  cfg.redraw_dgp_per_run = false;
  const McTable fixed = run_experiment(cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].rmse != fixed.entries[i].rmse) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("small seeded run reproduces the qualitative error pattern") {
  McConfig cfg;
  cfg.T_list = {200};
  cfg.lags_report = {0, 20, 80};
  cfg.replications = 24;
  cfg.seed = 2;
  cfg.threads = 0;  // hardware concurrency
  const McTable table = run_experiment(cfg);

  const double lvar20 = table.rmse(200, 20, Estimator::Lvar);
  const double lvar80 = table.rmse(200, 80, Estimator::Lvar);
  const double vecm20 = table.rmse(200, 20, Estimator::Vecm);
  const double vecm80 = table.rmse(200, 80, Estimator::Vecm);

  // The levels fit drifts at long lags; the error-correction fit stays flat
  // and beats it there.
  CHECK(lvar80 > lvar20);
  CHECK(vecm80 < lvar80);
  CHECK(vecm80 <= 1.5 * vecm20);
  for (const McEntry& e : table.entries) CHECK(e.rmse > 0.0);
}
