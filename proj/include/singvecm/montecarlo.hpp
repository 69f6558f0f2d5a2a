#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "singvecm/model.hpp"
#include "singvecm/simulate.hpp"

namespace singvecm {

enum class Estimator { Dvar, Lvar, Vecm };

const char* estimator_name(Estimator est);  // "DVAR", "LVAR", "VECM"

// Experiment design: one four-series, three-shock system with cointegration
// rank three is drawn once from the seeded generator, and for every sample
// length each replication simulates a fresh path, fits each estimator with
// its conventional lag order (differences fit: two difference lags; levels
// and error-correction fits: the true order two), identifies shocks, and
// accumulates level impulse-response errors at the reported lags.
struct McConfig {
  int r = 4;
  int q = 3;
  int c = 3;
  std::vector<int> T_list{100, 500, 1000, 5000};
  std::vector<int> lags_report{0, 4, 20, 40, 80};
  int replications = 1000;
  std::vector<Estimator> estimators{Estimator::Dvar, Estimator::Lvar, Estimator::Vecm};
  int dvar_lags = 2;  // lags of the difference fit
  int lvar_lags = 2;  // order of the levels fit
  int vecm_lags = 2;  // implied levels order of the error-correction fit
  unsigned long long seed = 1;
  bool redraw_dgp_per_run = false;  // default: one system for all replications
  int burn_in = 200;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;          // throws ConfigError
  std::string digest() const;     // stable hex digest of every field
};

struct McEntry {
  int T = 0;
  int lag = 0;
  Estimator estimator = Estimator::Dvar;
  double rmse = 0.0;
  int n_reps = 0;
  int n_failures = 0;  // times this estimator threw (each one forced a redraw)
};

struct McTable {
  McConfig config;
  std::string config_digest;
  DgpDraw draw;                  // the system used when redraw_dgp_per_run is false
  std::vector<McEntry> entries;  // complete grid, ordered T-major, then lag, then estimator

  double rmse(int T, int lag, Estimator est) const;  // throws std::out_of_range
};

// Root mean squared error across replications and all r x q level responses:
// sqrt( (1/(N r q)) sum_reps sum_{i,j} (est[lag](i,j) - truth[lag](i,j))^2 ).
// Throws ConfigError on an empty list, a lag beyond any horizon, or shape
// mismatches.
double rmse_at_lag(const std::vector<IrfSet>& est_irfs, const IrfSet& truth, int lag);

// Test seam: when set, replaces the simulate-and-fit step of one replication
// and must return the impulse responses to score (given the truth). Throwing
// from the hook is treated like an estimation failure.
using EstimateOverride =
    std::function<IrfSet(const IrfSet& truth, int T, int rep, Estimator est)>;

// Runs the full experiment grid. Deterministic given (config, seed) for any
// thread count: replication streams are indexed by replication number and the
// final reduction runs in replication order. A replication whose estimation
// fails is logged, counted, and redrawn from a derived stream; more redraws
// than one percent of the replications (at least one) aborts the run.
McTable run_experiment(const McConfig& cfg);
McTable run_experiment(const McConfig& cfg, const EstimateOverride& override_fit);

}  // namespace singvecm
