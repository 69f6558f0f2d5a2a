#include "singvecm/estimate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "singvecm/errors.hpp"

namespace singvecm {

namespace {

Eigen::MatrixXd first_differences(const Eigen::MatrixXd& Y) {
  if (Y.rows() < 2) throw InsufficientData("need at least two observations to difference");
  return Y.bottomRows(Y.rows() - 1) - Y.topRows(Y.rows() - 1);
}

double condition_number(const Eigen::MatrixXd& X) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double smax = svd.singularValues()(0);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

// Least squares of each column of Y on the columns of X (shared design).
// Throws CollinearRegressors when X is numerically rank deficient.
Eigen::MatrixXd solve_ls(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-12);
  if (qr.rank() < X.cols()) {
    std::ostringstream os;
    os << "design matrix is rank deficient (rank " << qr.rank() << " of " << X.cols()
       << ", condition number " << condition_number(X) << ")";
    throw CollinearRegressors(os.str());
  }
  return qr.solve(Y);
}

// Symmetric condition number via the eigenvalue spread (input assumed symmetric).
double sym_condition(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(es.eigenvalues().size() - 1);
  if (lmin <= 0.0) return std::numeric_limits<double>::infinity();
  return lmax / lmin;
}

// Add a tiny diagonal ridge when the symmetric moment matrix is close to
// singular, so the downstream solves stay well posed.
void ridge_if_needed(Eigen::MatrixXd& S, const char* label) {
  constexpr double kCondLimit = 1e12;
  if (sym_condition(S) <= kCondLimit) return;
  const double eps = 1e-10 * S.trace() / static_cast<double>(S.rows());
  S += eps * Eigen::MatrixXd::Identity(S.rows(), S.cols());
  std::ostringstream os;
  os << "moment matrix " << label << " is near singular; adding ridge " << eps;
  warn(os.str());
}

// Moving-average coefficients K_0..K_H of a lag-P autoregression
// (K_0 = I, K_j = sum_i B_i K_{j-i}).
std::vector<Eigen::MatrixXd> ma_coefficients(const std::vector<Eigen::MatrixXd>& B,
                                             int r, int horizons) {
  std::vector<Eigen::MatrixXd> K;
  K.reserve(static_cast<std::size_t>(horizons) + 1);
  K.push_back(Eigen::MatrixXd::Identity(r, r));
  for (int j = 1; j <= horizons; ++j) {
    Eigen::MatrixXd kj = Eigen::MatrixXd::Zero(r, r);
    const int imax = std::min<int>(j, static_cast<int>(B.size()));
    for (int i = 1; i <= imax; ++i) kj += B[static_cast<std::size_t>(i - 1)] * K[static_cast<std::size_t>(j - i)];
    K.push_back(std::move(kj));
  }
  return K;
}

IrfSet irf_from_levels_var(const std::vector<Eigen::MatrixXd>& B,
                           const Eigen::MatrixXd& R_hat, int horizons) {
  const int r = static_cast<int>(R_hat.rows());
  IrfSet irf;
  irf.horizons = horizons;
  const std::vector<Eigen::MatrixXd> K = ma_coefficients(B, r, horizons);
  irf.level_coeffs.reserve(K.size());
  irf.diff_coeffs.reserve(K.size());
  for (std::size_t j = 0; j < K.size(); ++j) {
    irf.level_coeffs.push_back(K[j] * R_hat);
    if (j == 0) {
      irf.diff_coeffs.push_back(irf.level_coeffs.back());
    } else {
      irf.diff_coeffs.push_back(irf.level_coeffs[j] - irf.level_coeffs[j - 1]);
    }
  }
  return irf;
}

}  // namespace

VarEstimate ols_var(const Eigen::MatrixXd& Y_in, int lags, VarKind kind) {
  if (lags < 1) throw ConfigError("lag order must be at least 1");
  const Eigen::MatrixXd Y = (kind == VarKind::Differences) ? first_differences(Y_in) : Y_in;
  const int T = static_cast<int>(Y.rows());
  const int r = static_cast<int>(Y.cols());
  if (r < 1) throw InsufficientData("series must have at least one column");
  const int Teff = T - lags;
  const int ncoef = 1 + r * lags;
  if (Teff < ncoef + 5) {
    std::ostringstream os;
    os << "effective sample " << Teff << " too short for " << ncoef
       << " regressors (need at least " << ncoef + 5 << ")";
    throw InsufficientData(os.str());
  }

  Eigen::MatrixXd X(Teff, ncoef);
  X.col(0).setOnes();
  for (int lag = 1; lag <= lags; ++lag) {
    X.middleCols(1 + (lag - 1) * r, r) = Y.middleRows(lags - lag, Teff);
  }
  const Eigen::MatrixXd target = Y.bottomRows(Teff);
  const Eigen::MatrixXd coef = solve_ls(X, target);  // ncoef x r

  VarEstimate est;
  est.kind = kind;
  est.lag_order = lags;
  est.intercept = coef.row(0).transpose();
  est.B.reserve(static_cast<std::size_t>(lags));
  for (int lag = 1; lag <= lags; ++lag) {
    est.B.push_back(coef.middleRows(1 + (lag - 1) * r, r).transpose());
  }
  est.residuals = target - X * coef;
  est.sigma = est.residuals.transpose() * est.residuals / static_cast<double>(Teff);
  return est;
}

VecmEstimate johansen_vecm(const Eigen::MatrixXd& Y, int lags, int rank, DetSpec det) {
  if (lags < 1) throw ConfigError("lag order must be at least 1");
  const int r = static_cast<int>(Y.cols());
  if (rank < 1 || rank > r) throw ConfigError("cointegration rank must lie in [1, r]");
  const Eigen::MatrixXd dY = first_differences(Y);
  const int T = static_cast<int>(Y.rows());
  const int Teff = T - lags;
  const int nlagdiff = lags - 1;
  const int ncond = r * nlagdiff + (det == DetSpec::Const ? 1 : 0);
  if (Teff < r * lags + 6) {
    std::ostringstream os;
    os << "effective sample " << Teff << " too short for an order-" << lags
       << " error-correction fit on " << r << " series";
    throw InsufficientData(os.str());
  }

  // Rows t = lags .. T-1 of the original index.
  Eigen::MatrixXd Z0 = dY.bottomRows(Teff);                 // dY_t
  Eigen::MatrixXd Z1 = Y.middleRows(lags - 1, Teff);        // Y_{t-1}
  Eigen::MatrixXd Z2(Teff, ncond);                          // lagged diffs, const
  for (int lag = 1; lag <= nlagdiff; ++lag) {
    Z2.middleCols((lag - 1) * r, r) = dY.middleRows(nlagdiff - lag, Teff);
  }
  if (det == DetSpec::Const) Z2.col(ncond - 1).setOnes();

  Eigen::MatrixXd cond_coef;  // ncond x (r + r), for [Z0 Z1] jointly
  Eigen::MatrixXd R0 = Z0;
  Eigen::MatrixXd R1 = Z1;
  if (ncond > 0) {
    Eigen::MatrixXd joint(Teff, 2 * r);
    joint << Z0, Z1;
    cond_coef = solve_ls(Z2, joint);
    const Eigen::MatrixXd fitted = Z2 * cond_coef;
    R0 -= fitted.leftCols(r);
    R1 -= fitted.rightCols(r);
  }

  const double Tf = static_cast<double>(Teff);
  Eigen::MatrixXd S00 = R0.transpose() * R0 / Tf;
  Eigen::MatrixXd S01 = R0.transpose() * R1 / Tf;
  Eigen::MatrixXd S11 = R1.transpose() * R1 / Tf;
  ridge_if_needed(S00, "S00");
  ridge_if_needed(S11, "S11");

  const Eigen::LLT<Eigen::MatrixXd> llt00(S00);
  if (llt00.info() != Eigen::Success) throw EigenFailure("residual covariance is not positive definite");
  const Eigen::MatrixXd M = S01.transpose() * llt00.solve(S01);  // r x r symmetric PSD

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      0.5 * (M + M.transpose()), 0.5 * (S11 + S11.transpose()));
  if (ges.info() != Eigen::Success) throw EigenFailure("generalized eigensolver failed");

  VecmEstimate est;
  est.lag_order = lags;
  est.rank = rank;
  est.eigenvalues.resize(rank);
  Eigen::MatrixXd vecs(r, rank);
  for (int i = 0; i < rank; ++i) {
    const int src = r - 1 - i;  // ascending order -> take from the top
    est.eigenvalues(i) = std::clamp(ges.eigenvalues()(src), 0.0, 1.0 - 1e-15);
    vecs.col(i) = ges.eigenvectors().col(src);
  }

  // Orthonormal basis of the estimated cointegration space, signs fixed so the
  // largest-magnitude entry of each column is positive.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vecs);
  Eigen::MatrixXd beta = qr.householderQ() * Eigen::MatrixXd::Identity(r, rank);
  for (int j = 0; j < rank; ++j) {
    int imax = 0;
    beta.col(j).cwiseAbs().maxCoeff(&imax);
    if (beta(imax, j) < 0.0) beta.col(j) = -beta.col(j);
  }
  est.beta_hat = beta;

  // Loading matrix for this basis: projection of dY residuals on beta' Y_{t-1}.
  const Eigen::MatrixXd bsb = beta.transpose() * S11 * beta;  // rank x rank
  const Eigen::LLT<Eigen::MatrixXd> lltb(0.5 * (bsb + bsb.transpose()));
  if (lltb.info() != Eigen::Success) throw EigenFailure("projected moment matrix is not positive definite");
  est.alpha_hat = (lltb.solve(beta.transpose() * S01.transpose())).transpose();  // r x rank

  // Short-run coefficients: regress dY_t - Pi Y_{t-1} on the conditioning set.
  const Eigen::MatrixXd pi = est.alpha_hat * beta.transpose();
  const Eigen::MatrixXd ec_target = Z0 - Z1 * pi.transpose();
  est.gamma_hats.reserve(static_cast<std::size_t>(nlagdiff));
  if (ncond > 0) {
    const Eigen::MatrixXd gcoef = solve_ls(Z2, ec_target);  // ncond x r
    for (int lag = 1; lag <= nlagdiff; ++lag) {
      est.gamma_hats.push_back(gcoef.middleRows((lag - 1) * r, r).transpose());
    }
    if (det == DetSpec::Const) est.intercept = gcoef.row(ncond - 1).transpose();
    est.residuals = ec_target - Z2 * gcoef;
  } else {
    est.residuals = ec_target;
  }
  est.sigma = est.residuals.transpose() * est.residuals / Tf;
  return est;
}

ShockIdentification identify_shocks(const Eigen::MatrixXd& sigma, int q) {
  const int r = static_cast<int>(sigma.rows());
  if (sigma.cols() != r) throw ConfigError("covariance must be square");
  if (q < 1 || q > r) throw ConfigError("shock count must lie in [1, r]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sigma + sigma.transpose()));
  if (es.info() != Eigen::Success) throw EigenFailure("eigendecomposition of covariance failed");

  const double lmax = std::max(es.eigenvalues()(r - 1), 0.0);
  const double rank_tol = 1e-12 * std::max(lmax, 1e-300) * r;
  int numerical_rank = 0;
  for (int i = 0; i < r; ++i) {
    if (es.eigenvalues()(i) > rank_tol) ++numerical_rank;
  }
  if (numerical_rank < q) {
    std::ostringstream os;
    os << "requested " << q << " shocks but covariance has numerical rank " << numerical_rank
       << "; proceeding with the best rank-" << q << " approximation";
    warn(os.str());
  }

  Eigen::MatrixXd K(r, q);
  for (int i = 0; i < q; ++i) {
    const int src = r - 1 - i;  // descending eigenvalues
    K.col(i) = es.eigenvectors().col(src) * std::sqrt(std::max(es.eigenvalues()(src), 0.0));
  }

  // Rotate so the upper q x q block becomes lower triangular with nonnegative
  // diagonal: QR of the transposed upper block gives the required rotation.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(K.topRows(q).transpose());
  Eigen::MatrixXd rot = qr.householderQ();
  const Eigen::MatrixXd tri = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < q; ++j) {
    if (tri(j, j) < 0.0) rot.col(j) = -rot.col(j);
  }

  ShockIdentification ident;
  ident.rotation = rot;
  ident.R_hat = K * rot;
  // Scrub roundoff above the diagonal of the upper block so the convention is
  // exact in serialized output.
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      if (std::abs(ident.R_hat(i, j)) < 1e-12 * std::max(1.0, std::sqrt(lmax))) {
        ident.R_hat(i, j) = 0.0;
      }
    }
  }
  return ident;
}

IrfSet irf_from_estimate(const VarEstimate& est, const ShockIdentification& ident, int horizons) {
  if (horizons < 0) throw ConfigError("horizon must be nonnegative");
  const int r = static_cast<int>(ident.R_hat.rows());
  if (!est.B.empty() && est.B.front().rows() != r) {
    throw ConfigError("impact matrix row count does not match the fitted system");
  }
  if (est.kind == VarKind::Levels) {
    return irf_from_levels_var(est.B, ident.R_hat, horizons);
  }
  // Difference fit: the fitted moving average describes the differences;
  // cumulate to recover level responses.
  IrfSet diff_irf = irf_from_levels_var(est.B, ident.R_hat, horizons);
  IrfSet irf;
  irf.horizons = horizons;
  irf.diff_coeffs = diff_irf.level_coeffs;
  irf.level_coeffs.reserve(irf.diff_coeffs.size());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(r, ident.R_hat.cols());
  for (const Eigen::MatrixXd& d : irf.diff_coeffs) {
    acc += d;
    irf.level_coeffs.push_back(acc);
  }
  return irf;
}

IrfSet irf_from_estimate(const VecmEstimate& est, const ShockIdentification& ident, int horizons) {
  const Eigen::MatrixXd pi = est.alpha_hat * est.beta_hat.transpose();
  const std::vector<Eigen::MatrixXd> B = vecm_to_var(pi, est.gamma_hats);
  VarEstimate levels;
  levels.kind = VarKind::Levels;
  levels.lag_order = static_cast<int>(B.size());
  levels.B = B;
  return irf_from_estimate(levels, ident, horizons);
}

std::vector<Eigen::MatrixXd> vecm_to_var(const Eigen::MatrixXd& pi,
                                         const std::vector<Eigen::MatrixXd>& gammas) {
  const int r = static_cast<int>(pi.rows());
  if (pi.cols() != r) throw ConfigError("error-correction matrix must be square");
  const int P = static_cast<int>(gammas.size()) + 1;
  std::vector<Eigen::MatrixXd> B(static_cast<std::size_t>(P), Eigen::MatrixXd::Zero(r, r));
  B[0] = Eigen::MatrixXd::Identity(r, r) + pi;
  if (P == 1) return B;
  B[0] += gammas[0];
  for (int i = 2; i <= P - 1; ++i) {
    B[static_cast<std::size_t>(i - 1)] = gammas[static_cast<std::size_t>(i - 1)] - gammas[static_cast<std::size_t>(i - 2)];
  }
  B[static_cast<std::size_t>(P - 1)] = -gammas[static_cast<std::size_t>(P - 2)];
  return B;
}

std::pair<Eigen::MatrixXd, std::vector<Eigen::MatrixXd>> var_to_vecm(
    const std::vector<Eigen::MatrixXd>& B) {
  if (B.empty()) throw ConfigError("autoregression must have at least one lag");
  const int r = static_cast<int>(B.front().rows());
  Eigen::MatrixXd pi = -Eigen::MatrixXd::Identity(r, r);
  for (const Eigen::MatrixXd& b : B) pi += b;
  const int P = static_cast<int>(B.size());
  std::vector<Eigen::MatrixXd> gammas;
  gammas.reserve(static_cast<std::size_t>(P - 1));
  for (int i = 1; i <= P - 1; ++i) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(r, r);
    for (int j = i + 1; j <= P; ++j) g -= B[static_cast<std::size_t>(j - 1)];
    gammas.push_back(std::move(g));
  }
  return {pi, gammas};
}

}  // namespace singvecm
