#include "singvecm/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "singvecm/errors.hpp"

namespace singvecm {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial Polynomial::from_roots(const std::vector<double>& roots, double scale) {
  std::vector<double> c{scale};
  for (double r : roots) {
    // Multiply by (z - r).
    c.push_back(0.0);
    for (size_t k = c.size() - 1; k >= 1; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
  }
  return Polynomial(std::move(c));
}

std::complex<double> Polynomial::eval(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double Polynomial::eval(double z) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial add(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.coeffs().size(), b.coeffs().size()), 0.0);
  for (size_t k = 0; k < a.coeffs().size(); ++k) c[k] += a.coeffs()[k];
  for (size_t k = 0; k < b.coeffs().size(); ++k) c[k] += b.coeffs()[k];
  return Polynomial(std::move(c));
}

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<double> c(a.coeffs().size() + b.coeffs().size() - 1, 0.0);
  for (size_t i = 0; i < a.coeffs().size(); ++i)
    for (size_t j = 0; j < b.coeffs().size(); ++j) c[i + j] += a.coeffs()[i] * b.coeffs()[j];
  return Polynomial(std::move(c));
}

std::vector<std::complex<double>> poly_roots(const Polynomial& p) {
  if (p.is_zero()) throw std::invalid_argument("poly_roots: the zero polynomial has no root set");
  std::vector<std::complex<double>> roots;
  const auto& c = p.coeffs();
  size_t lo = 0;
  while (lo < c.size() - 1 && c[lo] == 0.0) {
    roots.emplace_back(0.0, 0.0);
    ++lo;
  }
  const int deg = int(c.size() - 1 - lo);
  if (deg == 0) return roots;

  // Monic normalization of the zero-root-free part.
  Eigen::VectorXd a(deg);
  const double lead = c.back();
  for (int k = 0; k < deg; ++k) a[k] = c[lo + size_t(k)] / lead;

  // Rescale the variable so the constant term has unit magnitude; this keeps
  // the companion matrix balanced when coefficients span many magnitudes.
  double gamma = std::pow(std::abs(a[0]), 1.0 / deg);
  gamma = std::clamp(gamma, 1e-8, 1e8);
  for (int k = 0; k < deg; ++k) a[k] /= std::pow(gamma, double(deg - k));

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -a[i];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw EigenFailure("poly_roots: companion eigensolver failed");
  for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()[i] * gamma);
  return roots;
}

double resultant(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero())
    throw DegenerateResultant("resultant: zero polynomial has no leading coefficient");
  const int m = a.degree();
  const int n = b.degree();
  if (m == 0 && n == 0) return 1.0;
  if (m == 0) return std::pow(a.leading(), n);
  if (n == 0) return std::pow(b.leading(), m);

  // Sylvester matrix: n rows of a's coefficients (descending), then m of b's.
  Eigen::MatrixXd syl = Eigen::MatrixXd::Zero(m + n, m + n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) syl(i, i + k) = a.coeffs()[size_t(m - k)];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) syl(n + i, i + k) = b.coeffs()[size_t(n - k)];
  return syl.determinant();
}

}  // namespace singvecm
