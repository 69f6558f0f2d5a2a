#include "singvecm/poly_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "singvecm/errors.hpp"

namespace singvecm {

PolyMatrix::PolyMatrix(std::vector<Eigen::MatrixXd> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("PolyMatrix: needs at least one coefficient");
  for (const auto& c : coeffs_)
    if (c.rows() != coeffs_[0].rows() || c.cols() != coeffs_[0].cols())
      throw std::invalid_argument("PolyMatrix: coefficient shapes differ");
  while (coeffs_.size() > 1 && coeffs_.back().isZero(0.0)) coeffs_.pop_back();
}

PolyMatrix::PolyMatrix(Eigen::MatrixXd constant)
    : coeffs_{std::move(constant)} {}

PolyMatrix PolyMatrix::identity(int n) { return PolyMatrix(Eigen::MatrixXd::Identity(n, n)); }

PolyMatrix PolyMatrix::zero(int rows, int cols) {
  return PolyMatrix(Eigen::MatrixXd::Zero(rows, cols));
}

Eigen::MatrixXd PolyMatrix::coeff_or_zero(int k) const {
  if (k < 0 || k > degree()) return Eigen::MatrixXd::Zero(rows(), cols());
  return coeffs_[size_t(k)];
}

double PolyMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

PolyMatrix PolyMatrix::trimmed(double tol) const {
  const double scale = max_abs();
  std::vector<Eigen::MatrixXd> c = coeffs_;
  while (c.size() > 1 && c.back().cwiseAbs().maxCoeff() <= tol * scale) c.pop_back();
  return PolyMatrix(std::move(c));
}

Eigen::MatrixXcd eval(const PolyMatrix& P, std::complex<double> z) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(P.rows(), P.cols());
  for (int k = P.degree(); k >= 0; --k) acc = acc * z + P.coeff(k);
  return acc;
}

Eigen::MatrixXd eval(const PolyMatrix& P, double z) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(P.rows(), P.cols());
  for (int k = P.degree(); k >= 0; --k) acc = acc * z + P.coeff(k);
  return acc;
}

PolyMatrix add(const PolyMatrix& P, const PolyMatrix& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols())
    throw std::invalid_argument("add: shape mismatch");
  std::vector<Eigen::MatrixXd> c(size_t(std::max(P.degree(), Q.degree())) + 1,
                                 Eigen::MatrixXd::Zero(P.rows(), P.cols()));
  for (int k = 0; k <= P.degree(); ++k) c[size_t(k)] += P.coeff(k);
  for (int k = 0; k <= Q.degree(); ++k) c[size_t(k)] += Q.coeff(k);
  return PolyMatrix(std::move(c));
}

PolyMatrix multiply(const PolyMatrix& P, const PolyMatrix& Q) {
  if (P.cols() != Q.rows()) throw std::invalid_argument("multiply: inner dimensions differ");
  std::vector<Eigen::MatrixXd> c(size_t(P.degree() + Q.degree()) + 1,
                                 Eigen::MatrixXd::Zero(P.rows(), Q.cols()));
  for (int i = 0; i <= P.degree(); ++i)
    for (int j = 0; j <= Q.degree(); ++j) c[size_t(i + j)] += P.coeff(i) * Q.coeff(j);
  return PolyMatrix(std::move(c));
}

PolyMatrix scalar_multiply(const Polynomial& s, const PolyMatrix& P) {
  std::vector<Eigen::MatrixXd> c(size_t(s.degree() + P.degree()) + 1,
                                 Eigen::MatrixXd::Zero(P.rows(), P.cols()));
  for (int i = 0; i <= s.degree(); ++i)
    for (int j = 0; j <= P.degree(); ++j) c[size_t(i + j)] += s[i] * P.coeff(j);
  return PolyMatrix(std::move(c));
}

double max_coeff_diff(const PolyMatrix& P, const PolyMatrix& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols())
    throw std::invalid_argument("max_coeff_diff: shape mismatch");
  double m = 0.0;
  for (int k = 0; k <= std::max(P.degree(), Q.degree()); ++k)
    m = std::max(m, (P.coeff_or_zero(k) - Q.coeff_or_zero(k)).cwiseAbs().maxCoeff());
  return m;
}

std::pair<Eigen::MatrixXd, PolyMatrix> bn_split(const PolyMatrix& P, BnMode mode) {
  const Eigen::MatrixXd at_one = eval(P, 1.0);
  const int deg = P.degree();
  if (mode == BnMode::AtOne) {
    // P*(L) has coefficients P*_k = -sum_{j>k} P_j, k = 0..deg-1.
    if (deg == 0) return {at_one, PolyMatrix::zero(P.rows(), P.cols())};
    std::vector<Eigen::MatrixXd> c(size_t(deg), Eigen::MatrixXd::Zero(P.rows(), P.cols()));
    Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(P.rows(), P.cols());
    for (int k = deg - 1; k >= 0; --k) {
      tail += P.coeff(k + 1);
      c[size_t(k)] = -tail;
    }
    return {at_one, PolyMatrix(std::move(c))};
  }
  // Lagged: P*(0) = P_0 and P*_k = -sum_{j>k} P_j for k >= 1.
  if (deg == 0) return {at_one, P};
  std::vector<Eigen::MatrixXd> c(size_t(deg), Eigen::MatrixXd::Zero(P.rows(), P.cols()));
  c[0] = P.coeff(0);
  Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(P.rows(), P.cols());
  for (int k = deg - 1; k >= 1; --k) {
    tail += P.coeff(k + 1);
    c[size_t(k)] = -tail;
  }
  return {at_one, PolyMatrix(std::move(c))};
}

Polynomial det_poly(const PolyMatrix& P) {
  if (P.rows() != P.cols()) throw std::invalid_argument("det_poly: matrix polynomial not square");
  const int n = P.rows();
  const int bound = P.degree() * n;
  if (bound == 0) return Polynomial({P.coeff(0).determinant()});

  // Evaluate at the (bound+1)-th roots of unity; the Vandermonde system is
  // unitary up to scale, so interpolation is exact to rounding.
  const int K = bound + 1;
  Eigen::VectorXcd values(K);
  for (int j = 0; j < K; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / K;
    values[j] = eval(P, std::complex<double>(std::cos(theta), std::sin(theta))).determinant();
  }
  std::vector<double> coeffs(size_t(K), 0.0);
  double maxabs = 0.0;
  for (int k = 0; k < K; ++k) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < K; ++j) {
      const double theta = -2.0 * std::numbers::pi * j * k / K;
      acc += values[j] * std::complex<double>(std::cos(theta), std::sin(theta));
    }
    coeffs[size_t(k)] = acc.real() / K;
    maxabs = std::max(maxabs, std::abs(coeffs[size_t(k)]));
  }
  // Interpolation leaves rounding dust on coefficients that are really zero.
  const double noise = 1e-11 * std::max(maxabs, 1e-300);
  for (auto& c : coeffs)
    if (std::abs(c) <= noise) c = 0.0;
  return Polynomial(std::move(coeffs));
}

namespace {

int numerical_rank(const Eigen::MatrixXcd& A, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = tol * sv[0];
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff && sv[i] > 0.0) ++rank;
  return rank;
}

// Lexicographic row subsets of size q from r rows.
std::vector<std::vector<int>> row_subsets(int r, int q) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<size_t>(q));
  for (int i = 0; i < q; ++i) idx[size_t(i)] = i;
  for (;;) {
    out.push_back(idx);
    int i = q - 1;
    while (i >= 0 && idx[size_t(i)] == r - q + i) --i;
    if (i < 0) break;
    ++idx[size_t(i)];
    for (int j = i + 1; j < q; ++j) idx[size_t(j)] = idx[size_t(j - 1)] + 1;
  }
  return out;
}

PolyMatrix select_rows(const PolyMatrix& V, const std::vector<int>& rows) {
  std::vector<Eigen::MatrixXd> c;
  c.reserve(size_t(V.degree()) + 1);
  for (int k = 0; k <= V.degree(); ++k) {
    Eigen::MatrixXd sub(rows.size(), V.cols());
    for (size_t i = 0; i < rows.size(); ++i) sub.row(Eigen::Index(i)) = V.coeff(k).row(rows[i]);
    c.push_back(std::move(sub));
  }
  return PolyMatrix(std::move(c));
}

bool root_sets_disjoint(const std::vector<std::complex<double>>& a,
                        const std::vector<std::complex<double>>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (std::abs(x - y) <= kRootClusterTol) return false;
  return true;
}

}  // namespace

ZerolessCertificate is_zeroless(const PolyMatrix& V, double tol) {
  const int r = V.rows(), q = V.cols();
  if (r <= q) throw std::invalid_argument("is_zeroless: matrix polynomial must be tall");

  const double scale = std::max(V.max_abs(), 1e-300);
  const double det_zero = 1e-12 * std::pow(scale, q);
  const auto subsets = row_subsets(r, q);

  // Collect minor determinants until one is not identically zero.
  std::vector<std::pair<std::vector<int>, Polynomial>> minors;
  int lead = -1;
  for (size_t s = 0; s < subsets.size(); ++s) {
    Polynomial d = det_poly(select_rows(V, subsets[s]));
    bool nonzero = false;
    for (double ck : d.coeffs())
      if (std::abs(ck) > det_zero) nonzero = true;
    minors.emplace_back(subsets[s], nonzero ? d : Polynomial());
    if (nonzero && lead < 0) lead = int(s);
  }
  if (lead < 0) {
    const int rank0 = numerical_rank(eval(V, std::complex<double>(0.0, 0.0)), tol);
    return {false, ZerolessCertificate::Probe{std::complex<double>(0.0, 0.0), rank0}};
  }

  // Candidate zeros of V are the roots of any nonzero minor determinant.
  const Polynomial& lead_det = minors[size_t(lead)].second;
  std::vector<std::complex<double>> lead_roots;
  if (lead_det.degree() >= 1) lead_roots = poly_roots(lead_det);
  for (const auto& z : lead_roots) {
    const int rank = numerical_rank(eval(V, z), tol);
    if (rank < q) return {false, ZerolessCertificate::Probe{z, rank}};
  }

  // Full rank everywhere; prefer a coprime minor pair as the witness.
  for (size_t s = 0; s < minors.size(); ++s) {
    if (int(s) == lead || minors[s].second.is_zero()) continue;
    const Polynomial& other = minors[s].second;
    std::vector<std::complex<double>> other_roots;
    if (other.degree() >= 1) other_roots = poly_roots(other);
    if (root_sets_disjoint(lead_roots, other_roots)) {
      const double res = resultant(lead_det, other);
      return {true,
              ZerolessCertificate::MinorPair{minors[size_t(lead)].first, minors[s].first, res}};
    }
  }
  // Non-generic layout: every minor pair shares roots yet no common zero
  // exists. Record a full-rank probe instead.
  const std::complex<double> probe =
      lead_roots.empty() ? std::complex<double>(0.0, 0.0) : lead_roots[0];
  return {true, ZerolessCertificate::Probe{probe, q}};
}

std::vector<std::pair<std::complex<double>, int>> rank_drop_candidates(const PolyMatrix& V,
                                                                       double tol) {
  const int r = V.rows(), q = V.cols();
  if (r <= q)
    throw std::invalid_argument("rank_drop_candidates: matrix polynomial must be tall");
  const double scale = std::max(V.max_abs(), 1e-300);
  const double det_zero = 1e-12 * std::pow(scale, q);
  for (const auto& rows : row_subsets(r, q)) {
    const Polynomial d = det_poly(select_rows(V, rows));
    bool nonzero = false;
    for (double ck : d.coeffs())
      if (std::abs(ck) > det_zero) nonzero = true;
    if (!nonzero) continue;
    std::vector<std::pair<std::complex<double>, int>> out;
    if (d.degree() >= 1)
      for (const auto& z : poly_roots(d)) out.emplace_back(z, numerical_rank(eval(V, z), tol));
    return out;
  }
  throw DegenerateResultant("rank_drop_candidates: every minor determinant vanishes identically");
}

bool is_stable(const PolyMatrix& N, double margin) {
  const Polynomial d = det_poly(N);
  if (d.is_zero()) return false;
  if (d.degree() == 0) return true;
  for (const auto& z : poly_roots(d))
    if (std::abs(z) <= 1.0 + margin) return false;
  return true;
}

}  // namespace singvecm
