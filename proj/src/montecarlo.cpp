#include "singvecm/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "singvecm/errors.hpp"
#include "singvecm/estimate.hpp"

namespace singvecm {

namespace {

constexpr int kMaxAttemptsPerRep = 4;
constexpr unsigned kRetryStreamStride = 1u << 20;  // keeps retry streams clear of base ones

void fnv_mix(std::uint64_t& h, const std::string& s) {
  for (const char ch : s) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(ch));
    h *= 1099511628211ull;
  }
}

IrfSet fit_and_irf(Estimator est, const McConfig& cfg, const Eigen::MatrixXd& Y, int horizon) {
  switch (est) {
    case Estimator::Dvar: {
      const VarEstimate fit = ols_var(Y, cfg.dvar_lags, VarKind::Differences);
      return irf_from_estimate(fit, identify_shocks(fit.sigma, cfg.q), horizon);
    }
    case Estimator::Lvar: {
      const VarEstimate fit = ols_var(Y, cfg.lvar_lags, VarKind::Levels);
      return irf_from_estimate(fit, identify_shocks(fit.sigma, cfg.q), horizon);
    }
    case Estimator::Vecm: {
      const VecmEstimate fit = johansen_vecm(Y, cfg.vecm_lags, cfg.c);
      return irf_from_estimate(fit, identify_shocks(fit.sigma, cfg.q), horizon);
    }
  }
  throw ConfigError("unknown estimator");
}

unsigned long long per_rep_draw_seed(unsigned long long seed, int rep) {
  // Distinct for distinct replications (odd multiplier, invertible mod 2^64).
  return seed + 0x9E3779B97F4A7C15ull * static_cast<unsigned long long>(rep + 1);
}

struct TruthBundle {
  DgpDraw draw;
  IrfSet irf;
};

TruthBundle make_truth(unsigned long long draw_seed, int horizon) {
  TruthBundle t;
  t.draw = draw_dgp(draw_seed);
  auto [spec, rep] = dgp_to_spec(t.draw);
  t.irf = theoretical_irf(spec, horizon);
  return t;
}

}  // namespace

const char* estimator_name(Estimator est) {
  switch (est) {
    case Estimator::Dvar: return "DVAR";
    case Estimator::Lvar: return "LVAR";
    case Estimator::Vecm: return "VECM";
  }
  return "?";
}

void McConfig::validate() const {
  if (r != 4 || q != 3 || c != 3) {
    throw ConfigError("only the built-in four-series, three-shock, rank-three design is available");
  }
  if (T_list.empty()) throw ConfigError("T_list must not be empty");
  for (const int T : T_list) {
    if (T < 30) throw ConfigError("sample lengths below 30 are not meaningful here");
  }
  if (lags_report.empty()) throw ConfigError("lags_report must not be empty");
  for (const int lag : lags_report) {
    if (lag < 0) throw ConfigError("reported lags must be nonnegative");
  }
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (replications > (1 << 20)) throw ConfigError("replications capped at 2^20 by the stream layout");
  if (estimators.empty()) throw ConfigError("estimator set must not be empty");
  if (dvar_lags < 1 || lvar_lags < 1 || vecm_lags < 1) throw ConfigError("lag orders must be at least 1");
  if (burn_in < 0) throw ConfigError("burn-in must be nonnegative");
  if (threads < 0) throw ConfigError("thread count must be nonnegative");
}

std::string McConfig::digest() const {
  std::ostringstream os;
  os << r << '|' << q << '|' << c << '|';
  for (const int T : T_list) os << T << ',';
  os << '|';
  for (const int lag : lags_report) os << lag << ',';
  os << '|' << replications << '|';
  for (const Estimator e : estimators) os << estimator_name(e) << ',';
  os << '|' << dvar_lags << '|' << lvar_lags << '|' << vecm_lags << '|' << seed << '|'
     << (redraw_dgp_per_run ? 1 : 0) << '|' << burn_in;
  std::uint64_t h = 14695981039346656037ull;
  fnv_mix(h, os.str());
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

double McTable::rmse(int T, int lag, Estimator est) const {
  for (const McEntry& e : entries) {
    if (e.T == T && e.lag == lag && e.estimator == est) return e.rmse;
  }
  std::ostringstream os;
  os << "no entry for T=" << T << " lag=" << lag << " estimator=" << estimator_name(est);
  throw std::out_of_range(os.str());
}

double rmse_at_lag(const std::vector<IrfSet>& est_irfs, const IrfSet& truth, int lag) {
  if (est_irfs.empty()) throw ConfigError("need at least one replication");
  if (lag < 0 || lag > truth.horizons) throw ConfigError("lag beyond the truth horizon");
  const Eigen::MatrixXd& ref = truth.level_coeffs.at(static_cast<std::size_t>(lag));
  double total = 0.0;
  for (const IrfSet& est : est_irfs) {
    if (lag > est.horizons) throw ConfigError("lag beyond an estimate's horizon");
    const Eigen::MatrixXd& m = est.level_coeffs.at(static_cast<std::size_t>(lag));
    if (m.rows() != ref.rows() || m.cols() != ref.cols()) throw ConfigError("response shape mismatch");
    total += (m - ref).squaredNorm();
  }
  const double denom =
      static_cast<double>(est_irfs.size()) * static_cast<double>(ref.rows() * ref.cols());
  return std::sqrt(total / denom);
}

McTable run_experiment(const McConfig& cfg) { return run_experiment(cfg, EstimateOverride()); }

McTable run_experiment(const McConfig& cfg, const EstimateOverride& override_fit) {
  cfg.validate();
  const int horizon = *std::max_element(cfg.lags_report.begin(), cfg.lags_report.end());
  const int n_lags = static_cast<int>(cfg.lags_report.size());
  const int n_est = static_cast<int>(cfg.estimators.size());
  const int reps = cfg.replications;
  const int max_redraws = std::max(1, (reps + 99) / 100);  // one percent, at least one

  McTable table;
  table.config = cfg;
  table.config_digest = cfg.digest();

  TruthBundle shared;  // used unless the design is redrawn per replication
  if (!cfg.redraw_dgp_per_run) {
    shared = make_truth(cfg.seed, horizon);
    table.draw = shared.draw;
  } else {
    table.draw = draw_dgp(cfg.seed);  // representative metadata only
  }

  int n_threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, reps));

  for (const int T : cfg.T_list) {
    // Per-replication squared-error sums, indexed [estimator][rep][lag] so the
    // final reduction can run in replication order whatever the schedule was.
    std::vector<std::vector<std::vector<double>>> errsq(
        static_cast<std::size_t>(n_est),
        std::vector<std::vector<double>>(static_cast<std::size_t>(reps),
                                         std::vector<double>(static_cast<std::size_t>(n_lags), 0.0)));
    std::vector<std::atomic<int>> fail_count(static_cast<std::size_t>(n_est));
    for (auto& f : fail_count) f.store(0);
    std::atomic<int> redraws{0};
    std::atomic<int> next_rep{0};
    std::atomic<bool> abort{false};
    std::mutex error_mutex;
    std::string error_message;

    auto worker = [&]() {
      for (;;) {
        const int rep = next_rep.fetch_add(1);
        if (rep >= reps || abort.load()) return;
        bool done = false;
        for (int attempt = 0; attempt < kMaxAttemptsPerRep && !done; ++attempt) {
          if (abort.load()) return;
          int failing_est = -1;
          std::string what;
          try {
            TruthBundle local;
            const TruthBundle& truth =
                cfg.redraw_dgp_per_run
                    ? (local = make_truth(per_rep_draw_seed(cfg.seed, rep), horizon), local)
                    : shared;
            Eigen::MatrixXd Y;
            if (!override_fit) {
              const unsigned stream =
                  1u + static_cast<unsigned>(rep) + kRetryStreamStride * static_cast<unsigned>(attempt);
              const SimPath path = simulate_factors(truth.draw, T, cfg.burn_in, cfg.seed, stream);
              Y = path.F();
            }
            for (int e = 0; e < n_est; ++e) {
              failing_est = e;
              const Estimator est = cfg.estimators[static_cast<std::size_t>(e)];
              const IrfSet irf = override_fit ? override_fit(truth.irf, T, rep, est)
                                              : fit_and_irf(est, cfg, Y, horizon);
              for (int li = 0; li < n_lags; ++li) {
                const int lag = cfg.lags_report[static_cast<std::size_t>(li)];
                if (lag > irf.horizons || lag > truth.irf.horizons) {
                  throw ConfigError("reported lag beyond the computed horizon");
                }
                const Eigen::MatrixXd diff =
                    irf.level_coeffs[static_cast<std::size_t>(lag)] -
                    truth.irf.level_coeffs[static_cast<std::size_t>(lag)];
                errsq[static_cast<std::size_t>(e)][static_cast<std::size_t>(rep)]
                     [static_cast<std::size_t>(li)] = diff.squaredNorm();
              }
            }
            done = true;
          } catch (const std::exception& ex) {
            what = ex.what();
            if (failing_est >= 0 && failing_est < n_est) {
              fail_count[static_cast<std::size_t>(failing_est)].fetch_add(1);
            }
            {
              std::ostringstream os;
              os << "replication " << rep << " (T=" << T << ", attempt " << attempt
                 << ") failed: " << what << "; redrawing";
              warn(os.str());
            }
            const int used = redraws.fetch_add(1) + 1;
            if (used > max_redraws || attempt + 1 >= kMaxAttemptsPerRep) {
              std::lock_guard<std::mutex> lock(error_mutex);
              if (error_message.empty()) {
                std::ostringstream os;
                os << "too many failed replications (limit " << max_redraws
                   << "); last failure at replication " << rep << ": " << what;
                error_message = os.str();
              }
              abort.store(true);
              return;
            }
          }
        }
      }
    };

    if (n_threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(n_threads));
      for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
      for (std::thread& th : pool) th.join();
    }
    if (abort.load()) {
      std::lock_guard<std::mutex> lock(error_mutex);
      throw std::runtime_error(error_message.empty() ? "experiment aborted" : error_message);
    }

    const double denom = static_cast<double>(reps) * static_cast<double>(cfg.r * cfg.q);
    for (int li = 0; li < n_lags; ++li) {
      for (int e = 0; e < n_est; ++e) {
        double total = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
          total += errsq[static_cast<std::size_t>(e)][static_cast<std::size_t>(rep)]
                        [static_cast<std::size_t>(li)];
        }
        McEntry entry;
        entry.T = T;
        entry.lag = cfg.lags_report[static_cast<std::size_t>(li)];
        entry.estimator = cfg.estimators[static_cast<std::size_t>(e)];
        entry.rmse = std::sqrt(total / denom);
        entry.n_reps = reps;
        entry.n_failures = fail_count[static_cast<std::size_t>(e)].load();
        table.entries.push_back(entry);
      }
    }
  }
  return table;
}

}  // namespace singvecm
