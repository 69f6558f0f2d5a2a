#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <variant>
#include <vector>

#include "singvecm/polynomial.hpp"

namespace singvecm {

// Numerical rank: singular values >= kRankTol * sigma_max count.
inline constexpr double kRankTol = 1e-10;
// Roots closer than this are treated as shared when certifying coprimality.
inline constexpr double kRootClusterTol = 1e-7;
// A stable polynomial's determinant roots must have modulus > 1 + this margin.
inline constexpr double kStabilityMargin = 1e-6;
// Default cap for the left-inverse degree search.
inline constexpr int kDefaultLeftInverseDegree = 12;

// Finite matrix polynomial in the lag operator, coefficient of L^0 first.
// Exactly-zero trailing coefficient matrices are trimmed on construction, so
// the stored degree is minimal; a zero polynomial keeps one zero coefficient.
// Values are immutable after construction and safe to share across threads.
class PolyMatrix {
 public:
  PolyMatrix() : PolyMatrix(Eigen::MatrixXd::Zero(1, 1)) {}
  explicit PolyMatrix(std::vector<Eigen::MatrixXd> coeffs);
  PolyMatrix(std::initializer_list<Eigen::MatrixXd> coeffs)
      : PolyMatrix(std::vector<Eigen::MatrixXd>(coeffs)) {}
  explicit PolyMatrix(Eigen::MatrixXd constant);

  static PolyMatrix identity(int n);
  static PolyMatrix zero(int rows, int cols);

  int rows() const { return int(coeffs_[0].rows()); }
  int cols() const { return int(coeffs_[0].cols()); }
  int degree() const { return int(coeffs_.size()) - 1; }
  const std::vector<Eigen::MatrixXd>& coeffs() const { return coeffs_; }
  const Eigen::MatrixXd& coeff(int k) const { return coeffs_.at(size_t(k)); }
  // Coefficient of L^k, a zero matrix beyond the stored degree.
  Eigen::MatrixXd coeff_or_zero(int k) const;

  // Largest absolute entry over all coefficients.
  double max_abs() const;
  // Copy with trailing coefficients of relative magnitude <= tol dropped.
  PolyMatrix trimmed(double tol) const;

 private:
  std::vector<Eigen::MatrixXd> coeffs_;
};

Eigen::MatrixXcd eval(const PolyMatrix& P, std::complex<double> z);
Eigen::MatrixXd eval(const PolyMatrix& P, double z);

PolyMatrix add(const PolyMatrix& P, const PolyMatrix& Q);
PolyMatrix multiply(const PolyMatrix& P, const PolyMatrix& Q);
// Product s(L) * P(L) with a scalar polynomial.
PolyMatrix scalar_multiply(const Polynomial& s, const PolyMatrix& P);
// Largest absolute entry of P - Q over all (zero-padded) coefficients.
double max_coeff_diff(const PolyMatrix& P, const PolyMatrix& Q);

// Beveridge-Nelson style splits of P(L):
//   AtOne:  P(L) = P(1)   + (1-L) P*(L)
//   Lagged: P(L) = P(1) L + (1-L) P*(L)
// Both return (P(1), P*) and recompose exactly up to rounding.
enum class BnMode { AtOne, Lagged };
std::pair<Eigen::MatrixXd, PolyMatrix> bn_split(const PolyMatrix& P, BnMode mode);

// Determinant of a square matrix polynomial as a scalar polynomial, computed
// by evaluation at roots of unity and inverse DFT interpolation.
Polynomial det_poly(const PolyMatrix& P);

// Evidence that a tall matrix polynomial has (or lacks) full column rank at
// every complex point.
struct ZerolessCertificate {
  // Two row subsets whose minor determinant polynomials share no root; their
  // resultant magnitude backs a true verdict.
  struct MinorPair {
    std::vector<int> rows_a;
    std::vector<int> rows_b;
    double resultant;
  };
  // A probe point with the numerical column rank found there. Backs a false
  // verdict (rank < cols at z), and serves as the fallback witness for a true
  // verdict when every pair of minors shares roots without a common zero.
  struct Probe {
    std::complex<double> z;
    int rank;
  };
  bool verdict;
  std::variant<MinorPair, Probe> witness;
};

// True iff no complex z drops the column rank of V. Roots of a nonzero
// cols x cols minor determinant are the only candidates; the rank of V at
// each is tested against tol * sigma_max.
ZerolessCertificate is_zeroless(const PolyMatrix& V, double tol = kRankTol);

// The candidate rank-drop points of a tall V: roots of the first row-minor
// determinant that is not identically zero, each paired with the numerical
// column rank of V there. Empty when that minor is a nonzero constant; throws
// DegenerateResultant when every minor vanishes identically (V is nowhere of
// full column rank).
std::vector<std::pair<std::complex<double>, int>> rank_drop_candidates(const PolyMatrix& V,
                                                                       double tol = kRankTol);

// Minimal-degree stable left inverse: N(L) = I + N_1 L + ... + N_p L^p with
// N(L) M(L) = M(0) coefficient-wise to tol and all roots of det N outside the
// unit circle. Searches p = 0..max_degree; within a degree the minimum-norm
// solution is preferred, falling back to seeded kernel perturbations when the
// minimum-norm solution is unstable. Throws NotZeroless, RankDeficientAtZero,
// or NoStableInverseWithinDegree.
PolyMatrix left_inverse(const PolyMatrix& M, int max_degree = kDefaultLeftInverseDegree,
                        double tol = 1e-8);

// Particular minimum-norm solution of the degree-p identity system together
// with a basis of the per-row kernel (each kernel vector reshapes to the row
// blocks of N_1..N_p). Exposed so callers can build alternative valid
// inverses; residual is the identity defect of the particular solution.
struct LeftInverseSolutions {
  PolyMatrix particular;
  std::vector<Eigen::VectorXd> kernel;
  double residual;
};
LeftInverseSolutions left_inverse_at_degree(const PolyMatrix& M, int p);

// All determinant roots strictly outside the unit circle (modulus > 1 + margin).
bool is_stable(const PolyMatrix& N, double margin = kStabilityMargin);

}  // namespace singvecm
