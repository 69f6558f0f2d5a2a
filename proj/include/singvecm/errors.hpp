#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace singvecm {

// Contract violations raised by the algebra and estimation layers. Each type
// corresponds to one failure mode a caller can act on; messages carry the
// offending quantities.

struct NotZeroless : std::runtime_error {
  explicit NotZeroless(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoStableInverseWithinDegree : std::runtime_error {
  explicit NoStableInverseWithinDegree(const std::string& msg) : std::runtime_error(msg) {}
};

struct RankDeficientAtZero : std::runtime_error {
  explicit RankDeficientAtZero(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateResultant : std::runtime_error {
  explicit DegenerateResultant(const std::string& msg) : std::runtime_error(msg) {}
};

struct GenericityViolation : std::runtime_error {
  explicit GenericityViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

struct CollinearRegressors : std::runtime_error {
  explicit CollinearRegressors(const std::string& msg) : std::runtime_error(msg) {}
};

struct EigenFailure : std::runtime_error {
  explicit EigenFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct InconsistentDraw : std::runtime_error {
  explicit InconsistentDraw(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExplosiveSystem : std::runtime_error {
  explicit ExplosiveSystem(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-fatal diagnostics (rank checks that fail only at non-generic parameter
// points, ridge fallbacks, redrawn replications). Default sink is stderr;
// tests may install a capture hook. Never silently perturbs inputs.
using WarnHook = std::function<void(const std::string&)>;
void warn(const std::string& msg);
WarnHook set_warn_hook(WarnHook hook);

}  // namespace singvecm
