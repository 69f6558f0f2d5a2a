#pragma once

#include <complex>
#include <vector>

namespace singvecm {

// Real scalar polynomial, coefficients lowest degree first. Trailing zero
// coefficients are trimmed on construction, so coeffs().back() is the leading
// coefficient whenever the polynomial is nonzero; the zero polynomial is
// stored as the single coefficient 0.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);

  // Monic product of (z - root_i), then scaled by `scale`.
  static Polynomial from_roots(const std::vector<double>& roots, double scale = 1.0);

  int degree() const { return int(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double leading() const { return coeffs_.back(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double operator[](int k) const { return coeffs_[size_t(k)]; }

  std::complex<double> eval(std::complex<double> z) const;
  double eval(double z) const;

 private:
  std::vector<double> coeffs_;
};

Polynomial add(const Polynomial& a, const Polynomial& b);
Polynomial multiply(const Polynomial& a, const Polynomial& b);

// All complex roots (with multiplicity) via the companion matrix of the
// monic normalization, after factoring out roots at zero and rescaling the
// variable for balance. A nonzero constant has no roots; the zero polynomial
// is rejected.
std::vector<std::complex<double>> poly_roots(const Polynomial& p);

// Resultant of a and b via the Sylvester matrix determinant: equals
// lead(a)^deg(b) * lead(b)^deg(a) * prod_{i,j}(alpha_i - beta_j), and is zero
// exactly when a and b share a root. The zero polynomial has no well-defined
// leading coefficient and raises DegenerateResultant.
double resultant(const Polynomial& a, const Polynomial& b);

}  // namespace singvecm
