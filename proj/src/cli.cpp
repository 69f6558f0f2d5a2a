#include "singvecm/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "singvecm/errors.hpp"
#include "singvecm/estimate.hpp"
#include "singvecm/io.hpp"
#include "singvecm/model.hpp"
#include "singvecm/montecarlo.hpp"
#include "singvecm/simulate.hpp"
#include "singvecm/verify.hpp"

namespace singvecm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Everything one run needs; defaults are the documented ones. Flags override
// config-file values, which override these.
struct RunConfig {
  std::string spec_path;  // model document; required by every command but mc/verify
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int T = 500;
  bool T_given = false;  // a supplied T restricts the mc grid to that single length
  int burn_in = 200;
  int reps = 1000;
  int threads = 0;
  int horizons = 80;
  int lags = 2;
  std::string estimator = "theoretical";
  std::vector<int> T_list{100, 500, 1000, 5000};
  std::vector<int> lags_report{0, 4, 20, 40, 80};
};

constexpr const char* kValidConfigKeys =
    "T, T_list, burn_in, estimator, horizons, lags, lags_report, out, reps, seed, spec, "
    "threads";

int require_int(const json& value, const std::string& origin, const std::string& key) {
  if (!value.is_number_integer()) {
    throw ConfigError(origin + ": key \"" + key + "\" must be an integer");
  }
  return value.get<int>();
}

std::vector<int> require_int_array(const json& value, const std::string& origin,
                                   const std::string& key) {
  if (!value.is_array() || value.empty()) {
    throw ConfigError(origin + ": key \"" + key + "\" must be a nonempty array of integers");
  }
  std::vector<int> out;
  for (const json& item : value) out.push_back(require_int(item, origin, key));
  return out;
}

std::string require_string(const json& value, const std::string& origin,
                           const std::string& key) {
  if (!value.is_string()) {
    throw ConfigError(origin + ": key \"" + key + "\" must be a string");
  }
  return value.get<std::string>();
}

void apply_config_file(const std::string& path, RunConfig& rc) {
  const json doc = json::parse(read_text_file(path), nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path + ": not valid JSON");
  if (!doc.is_object()) throw ConfigError(path + ": top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "spec") {
      // A relative model path counts from the config file, so checked-in
      // configs work from any working directory.
      const fs::path p = fs::path(require_string(value, path, key));
      rc.spec_path = p.is_absolute() ? p.string() : (fs::path(path).parent_path() / p).string();
    } else if (key == "out") {
      rc.out_dir = require_string(value, path, key);
    } else if (key == "seed") {
      if (!value.is_number_integer() ||
          (!value.is_number_unsigned() && value.get<long long>() < 0)) {
        throw ConfigError(path + ": key \"seed\" must be a nonnegative integer");
      }
      rc.seed = value.get<std::uint64_t>();
    } else if (key == "T") {
      rc.T = require_int(value, path, key);
      rc.T_given = true;
    } else if (key == "burn_in") {
      rc.burn_in = require_int(value, path, key);
    } else if (key == "reps") {
      rc.reps = require_int(value, path, key);
    } else if (key == "threads") {
      rc.threads = require_int(value, path, key);
    } else if (key == "horizons") {
      rc.horizons = require_int(value, path, key);
    } else if (key == "lags") {
      rc.lags = require_int(value, path, key);
    } else if (key == "estimator") {
      rc.estimator = require_string(value, path, key);
    } else if (key == "T_list") {
      rc.T_list = require_int_array(value, path, key);
    } else if (key == "lags_report") {
      rc.lags_report = require_int_array(value, path, key);
    } else {
      throw ConfigError(path + ": unknown key \"" + key + "\"; valid keys: " +
                        kValidConfigKeys);
    }
  }
}

I1FamilySpec load_spec(const RunConfig& rc, const std::string& command) {
  if (rc.spec_path.empty()) {
    throw ConfigError(command + ": a model document is required (config key \"spec\")");
  }
  return spec_from_json_text(read_text_file(rc.spec_path), rc.spec_path);
}

std::string write_artifact(const RunConfig& rc, const std::string& name,
                           const std::string& content, std::ostream& out) {
  fs::create_directories(fs::path(rc.out_dir));
  const std::string path = (fs::path(rc.out_dir) / name).string();
  write_text_file(path, content);
  out << "wrote " << path << "\n";
  return path;
}

int cmd_simulate(const RunConfig& rc, std::ostream& out) {
  const I1FamilySpec spec = load_spec(rc, "simulate");
  const GrangerRep rep = granger_rep(spec);
  const SimPath path = simulate_factors(rep, rc.T, rc.burn_in, rc.seed, 1, spec.gamma_u);
  write_artifact(rc, "path.csv", path_csv(path), out);
  return 0;
}

int cmd_granger(const RunConfig& rc, std::ostream& out) {
  const I1FamilySpec spec = load_spec(rc, "granger");
  const GrangerRep rep = granger_rep(spec);
  write_artifact(rc, "granger.json", granger_to_json(rep), out);
  return 0;
}

int cmd_ptdecomp(const RunConfig& rc, std::ostream& out) {
  const I1FamilySpec spec = load_spec(rc, "ptdecomp");
  const PtDecomp pt = pt_decompose(spec);
  write_artifact(rc, "ptdecomp.json", pt_to_json(pt), out);
  return 0;
}

int cmd_irf(const RunConfig& rc, std::ostream& out) {
  const I1FamilySpec spec = load_spec(rc, "irf");
  IrfSet irf;
  if (rc.estimator == "theoretical") {
    irf = theoretical_irf(spec, rc.horizons);
  } else if (rc.estimator == "dvar" || rc.estimator == "lvar" || rc.estimator == "vecm") {
    const GrangerRep rep = granger_rep(spec);
    const SimPath path = simulate_factors(rep, rc.T, rc.burn_in, rc.seed, 1, spec.gamma_u);
    const Eigen::MatrixXd Y = path.F();
    if (rc.estimator == "vecm") {
      const VecmEstimate est = johansen_vecm(Y, rc.lags, spec.c);
      irf = irf_from_estimate(est, identify_shocks(est.sigma, spec.q), rc.horizons);
    } else {
      const VarKind kind = rc.estimator == "dvar" ? VarKind::Differences : VarKind::Levels;
      const VarEstimate est = ols_var(Y, rc.lags, kind);
      irf = irf_from_estimate(est, identify_shocks(est.sigma, spec.q), rc.horizons);
    }
  } else {
    throw ConfigError("irf: unknown estimator \"" + rc.estimator +
                      "\"; valid values: theoretical, dvar, lvar, vecm");
  }
  write_artifact(rc, "irf.csv", irf_csv(irf), out);
  return 0;
}

int cmd_mc(const RunConfig& rc, std::ostream& out) {
  McConfig cfg;
  cfg.T_list = rc.T_given ? std::vector<int>{rc.T} : rc.T_list;
  cfg.lags_report = rc.lags_report;
  cfg.replications = rc.reps;
  cfg.seed = rc.seed;
  cfg.burn_in = rc.burn_in;
  cfg.threads = rc.threads;
  const McTable table = run_experiment(cfg);
  write_artifact(rc, "table1.csv", mc_csv(table), out);
  write_artifact(rc, "table1.md", mc_markdown(table), out);
  return 0;
}

int cmd_verify(std::ostream& out, std::ostream& err) {
  const std::vector<CheckResult> results = run_acceptance_checks();
  int failed = 0;
  for (const CheckResult& res : results) {
    if (!res.pass) ++failed;
    out << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << " " << res.name << ": " << res.detail
        << "\n";
  }
  out << (results.size() - failed) << "/" << results.size() << " checks passed\n";
  if (failed > 0) {
    err << json{{"error", "VerificationFailed"},
                {"message", std::to_string(failed) + " of " + std::to_string(results.size()) +
                                " checks failed"}}
               .dump()
        << "\n";
    return 1;
  }
  return 0;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const NotZeroless*>(&e)) return "NotZeroless";
  if (dynamic_cast<const NoStableInverseWithinDegree*>(&e)) return "NoStableInverseWithinDegree";
  if (dynamic_cast<const RankDeficientAtZero*>(&e)) return "RankDeficientAtZero";
  if (dynamic_cast<const DegenerateResultant*>(&e)) return "DegenerateResultant";
  if (dynamic_cast<const GenericityViolation*>(&e)) return "GenericityViolation";
  if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
  if (dynamic_cast<const CollinearRegressors*>(&e)) return "CollinearRegressors";
  if (dynamic_cast<const EigenFailure*>(&e)) return "EigenFailure";
  if (dynamic_cast<const InconsistentDraw*>(&e)) return "InconsistentDraw";
  if (dynamic_cast<const ExplosiveSystem*>(&e)) return "ExplosiveSystem";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
  return "RuntimeError";
}

void error_record(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Reduced-rank cointegrated systems: representation, simulation, estimation, and "
      "estimator comparison",
      "singvecm"};
  app.require_subcommand(1);

  std::string config_path;
  RunConfig flags;  // only fields whose options were counted get copied over

  struct SubOpts {
    CLI::App* sub = nullptr;
    CLI::Option* config = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* outdir = nullptr;
    CLI::Option* reps = nullptr;
    CLI::Option* T = nullptr;
    CLI::Option* threads = nullptr;
  };
  const auto add_common = [&](const char* name, const char* desc) {
    SubOpts so;
    so.sub = app.add_subcommand(name, desc);
    so.config = so.sub->add_option("--config", config_path, "JSON run configuration");
    so.seed = so.sub->add_option("--seed", flags.seed, "random seed");
    so.outdir = so.sub->add_option("--out", flags.out_dir, "output directory");
    so.reps = so.sub->add_option("--reps", flags.reps, "experiment replications");
    so.T = so.sub->add_option("--T", flags.T, "sample length");
    so.threads = so.sub->add_option("--threads", flags.threads, "worker threads (0 = all cores)")
                     ->envname("SINGVECM_THREADS");
    return so;
  };

  const SubOpts simulate = add_common("simulate", "simulate a factor path -> path.csv");
  const SubOpts granger =
      add_common("granger", "error-correction representation of a model -> granger.json");
  const SubOpts irf = add_common("irf", "theoretical or estimated impulse responses -> irf.csv");
  const SubOpts ptdecomp =
      add_common("ptdecomp", "permanent/transitory decomposition -> ptdecomp.json");
  const SubOpts mc =
      add_common("mc", "estimator comparison experiment -> table1.csv, table1.md");
  const SubOpts verify = add_common("verify", "run the built-in acceptance checks");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help and friends
    error_record(err, "UsageError", e.what());
    return 2;
  }

  try {
    const SubOpts* active = nullptr;
    for (const SubOpts* so : {&simulate, &granger, &irf, &ptdecomp, &mc, &verify}) {
      if (so->sub->parsed()) active = so;
    }
    if (active == nullptr) throw ConfigError("no command parsed");  // unreachable

    RunConfig rc;
    if (active->config->count() > 0) apply_config_file(config_path, rc);
    if (active->seed->count() > 0) rc.seed = flags.seed;
    if (active->outdir->count() > 0) rc.out_dir = flags.out_dir;
    if (active->reps->count() > 0) rc.reps = flags.reps;
    if (active->T->count() > 0) {
      rc.T = flags.T;
      rc.T_given = true;
    }
    if (active->threads->count() > 0) rc.threads = flags.threads;

    if (active == &simulate) return cmd_simulate(rc, out);
    if (active == &granger) return cmd_granger(rc, out);
    if (active == &irf) return cmd_irf(rc, out);
    if (active == &ptdecomp) return cmd_ptdecomp(rc, out);
    if (active == &mc) return cmd_mc(rc, out);
    return cmd_verify(out, err);
  } catch (const std::exception& e) {
    error_record(err, error_kind(e), e.what());
    return 1;
  }
}

}  // namespace singvecm
