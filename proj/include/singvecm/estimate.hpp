#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "singvecm/model.hpp"

namespace singvecm {

enum class VarKind { Levels, Differences };
enum class DetSpec { None, Const };

// Least-squares autoregression, either on levels or on first differences:
//   y_t = intercept + B_1 y_{t-1} + ... + B_P y_{t-P} + e_t.
struct VarEstimate {
  VarKind kind = VarKind::Levels;
  int lag_order = 0;
  std::vector<Eigen::MatrixXd> B;  // B_1 .. B_P, each r x r
  Eigen::VectorXd intercept;       // r
  Eigen::MatrixXd residuals;       // T' x r
  Eigen::MatrixXd sigma;           // r x r, residual covariance (divisor T')
};

// Reduced-rank error-correction regression with known cointegration rank:
//   dY_t = alpha_hat beta_hat' Y_{t-1} + sum_i Gamma_i dY_{t-i} (+ intercept) + e_t.
// beta_hat has orthonormal columns; only its span is identified, so
// comparisons should use subspace angles. alpha_hat beta_hat' estimates the
// regression-form loading matrix (which converges to the negative of the
// autoregressive polynomial evaluated at one).
struct VecmEstimate {
  int lag_order = 0;  // order P of the implied levels autoregression
  int rank = 0;       // c
  Eigen::MatrixXd alpha_hat;                // r x c
  Eigen::MatrixXd beta_hat;                 // r x c, orthonormal columns
  std::vector<Eigen::MatrixXd> gamma_hats;  // Gamma_1 .. Gamma_{P-1}
  Eigen::VectorXd intercept;                // r, empty when DetSpec::None
  Eigen::MatrixXd residuals;                // T' x r
  Eigen::MatrixXd sigma;                    // r x r (divisor T')
  Eigen::VectorXd eigenvalues;              // c squared canonical correlations, descending
};

// Rank-q impact matrix pinned down by the recursive convention: the upper
// q x q block of R_hat is lower triangular with nonnegative diagonal, and
// R_hat R_hat' is the best rank-q approximation of the input covariance.
struct ShockIdentification {
  Eigen::MatrixXd R_hat;     // r x q
  Eigen::MatrixXd rotation;  // q x q orthogonal
};

// Equation-by-equation least squares with intercept. kind = Differences
// first-differences Y internally. Throws InsufficientData when the effective
// sample is shorter than the regressor count plus five, CollinearRegressors
// (reporting the condition number) when the design matrix is rank deficient.
VarEstimate ols_var(const Eigen::MatrixXd& Y, int lags, VarKind kind);

// Reduced-rank regression: residualize dY_t and Y_{t-1} on the lagged
// differences (and a constant when det = Const), form the moment matrices,
// solve the generalized symmetric eigenproblem, keep the rank leading
// directions. Falls back to a tiny ridge (with a warning) when a moment
// matrix's condition number exceeds 1e12, which singular innovations make
// expected at large T. Throws InsufficientData, EigenFailure.
VecmEstimate johansen_vecm(const Eigen::MatrixXd& Y, int lags, int rank,
                           DetSpec det = DetSpec::None);

// Eigendecompose sigma, keep the top q components, rotate them so the upper
// q x q block is lower triangular with nonnegative diagonal. Warns (and
// proceeds with the best rank-q approximation) when q exceeds the numerical
// rank of sigma.
ShockIdentification identify_shocks(const Eigen::MatrixXd& sigma, int q);

// Estimated level impulse responses out to the horizon. Levels fits use the
// moving-average coefficients of the fitted autoregression directly;
// difference fits cumulate theirs; error-correction fits are converted to the
// implied levels autoregression first.
IrfSet irf_from_estimate(const VarEstimate& est, const ShockIdentification& ident, int horizons);
IrfSet irf_from_estimate(const VecmEstimate& est, const ShockIdentification& ident, int horizons);

// Exact parameter bijection between the levels form and the error-correction
// form (pi = sum B_i - I, Gamma_i = -sum_{j>i} B_j, and back).
std::vector<Eigen::MatrixXd> vecm_to_var(const Eigen::MatrixXd& pi,
                                         const std::vector<Eigen::MatrixXd>& gammas);
std::pair<Eigen::MatrixXd, std::vector<Eigen::MatrixXd>> var_to_vecm(
    const std::vector<Eigen::MatrixXd>& B);

}  // namespace singvecm
