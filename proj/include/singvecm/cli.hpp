#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace singvecm {

// Command-line front end. `args` is the argument list without the program
// name; normal output goes to `out`, and every failure writes one JSON error
// record {"error": <kind>, "message": <text>} to `err`. Returns the process
// exit status: 0 on success, 2 on a usage error, 1 on any other failure.
//
// Commands (each accepts --config, --seed, --out, --reps, --T, --threads;
// flags override config-file values; SINGVECM_THREADS sets the default for
// --threads):
//   simulate  write a simulated factor path           -> path.csv
//   granger   write the error-correction representation -> granger.json
//   irf       write theoretical or estimated responses -> irf.csv
//   ptdecomp  write the permanent/transitory split     -> ptdecomp.json
//   mc        run the estimator comparison experiment  -> table1.csv, table1.md
//   verify    run the built-in acceptance checks; exit 0 iff all pass
//
// The config file is a flat JSON object; valid keys are
//   T, T_list, burn_in, estimator, horizons, lags, lags_report, out, reps,
//   seed, spec, threads
// and unknown keys are rejected listing that set. A relative "spec" path is
// resolved against the config file's directory; "out" is resolved against
// the working directory. Reruns with identical inputs rewrite byte-identical
// artifacts (no timestamps).
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace singvecm
