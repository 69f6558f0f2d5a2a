#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "singvecm/errors.hpp"
#include "singvecm/poly_matrix.hpp"
#include "singvecm/rng.hpp"

namespace singvecm {

namespace {

// The identity N(L)M(L) = M(0) with N_0 = I reads, per coefficient k >= 1,
//   M_k + sum_{j=1..p} N_j M_{k-j} = 0,   k = 1..p+m.
// Rows of the N_j decouple: with x stacking row i of N_1..N_p, each row
// solves the same system A x = b_i, where A block (k, j) is M_{k-j}'.
Eigen::MatrixXd system_matrix(const PolyMatrix& M, int p) {
  const int r = M.rows(), q = M.cols(), m = M.degree();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Eigen::Index(p + m) * q, Eigen::Index(p) * r);
  for (int k = 1; k <= p + m; ++k)
    for (int j = 1; j <= std::min(k, p); ++j)
      if (k - j <= m)
        A.block(Eigen::Index(k - 1) * q, Eigen::Index(j - 1) * r, q, r) =
            M.coeff(k - j).transpose();
  return A;
}

Eigen::MatrixXd system_rhs(const PolyMatrix& M, int p) {
  const int r = M.rows(), q = M.cols(), m = M.degree();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(Eigen::Index(p + m) * q, r);
  for (int k = 1; k <= m; ++k)
    B.middleRows(Eigen::Index(k - 1) * q, q) = -M.coeff(k).transpose();
  return B;
}

PolyMatrix assemble(const Eigen::MatrixXd& X, int r, int p) {
  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(size_t(p) + 1);
  coeffs.push_back(Eigen::MatrixXd::Identity(r, r));
  for (int j = 1; j <= p; ++j)
    coeffs.push_back(X.middleRows(Eigen::Index(j - 1) * r, r).transpose());
  return PolyMatrix(std::move(coeffs));
}

double identity_defect(const PolyMatrix& N, const PolyMatrix& M) {
  return max_coeff_diff(multiply(N, M), PolyMatrix(M.coeff(0)));
}

std::vector<Eigen::VectorXd> kernel_basis(const Eigen::MatrixXd& A) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? kRankTol * sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff && sv[i] > 0.0) ++rank;
  std::vector<Eigen::VectorXd> basis;
  for (int j = rank; j < svd.matrixV().cols(); ++j) basis.push_back(svd.matrixV().col(j));
  return basis;
}

}  // namespace

LeftInverseSolutions left_inverse_at_degree(const PolyMatrix& M, int p) {
  const int r = M.rows();
  if (p == 0) {
    const PolyMatrix N = PolyMatrix::identity(r);
    return {N, {}, identity_defect(N, M)};
  }
  const Eigen::MatrixXd A = system_matrix(M, p);
  const Eigen::MatrixXd B = system_rhs(M, p);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  const Eigen::MatrixXd X = cod.solve(B);
  const PolyMatrix N = assemble(X, r, p);
  return {N, kernel_basis(A), identity_defect(N, M)};
}

PolyMatrix left_inverse(const PolyMatrix& M, int max_degree, double tol) {
  const int r = M.rows(), q = M.cols();
  if (r <= q) throw std::invalid_argument("left_inverse: matrix polynomial must be tall");

  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.coeff(0));
    const auto& sv = svd.singularValues();
    if (sv.size() < q || sv[q - 1] <= kRankTol * sv[0])
      throw RankDeficientAtZero("left_inverse: constant coefficient lacks full column rank");
  }
  {
    const ZerolessCertificate cert = is_zeroless(M);
    if (!cert.verdict) {
      const auto& probe = std::get<ZerolessCertificate::Probe>(cert.witness);
      std::ostringstream os;
      os << "left_inverse: column rank drops to " << probe.rank << " at z = (" << probe.z.real()
         << ", " << probe.z.imag() << "); no finite-degree left inverse exists";
      throw NotZeroless(os.str());
    }
  }

  for (int p = 0; p <= max_degree; ++p) {
    LeftInverseSolutions sols = left_inverse_at_degree(M, p);
    if (sols.residual > tol) continue;
    if (is_stable(sols.particular)) return sols.particular;
    if (sols.kernel.empty()) continue;

    // The minimum-norm solution is unstable but the solution set is an affine
    // space: scan seeded kernel combinations for a stable member.
    const int dim = int(sols.kernel.size());
    Eigen::MatrixXd K(sols.kernel[0].size(), dim);
    for (int j = 0; j < dim; ++j) K.col(j) = sols.kernel[size_t(j)];
    CounterRng rng(0x5eedfa11, 0);
    const double base = sols.particular.max_abs() + 0.1;
    for (int attempt = 0; attempt < 60; ++attempt) {
      const double sigma = base * std::pow(0.7, attempt / 6);
      Eigen::MatrixXd C(dim, r);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < r; ++j) C(i, j) = sigma * rng.gaussian();
      // Shift each row of the stacked unknowns inside the kernel.
      std::vector<Eigen::MatrixXd> coeffs = sols.particular.coeffs();
      coeffs.resize(size_t(p) + 1, Eigen::MatrixXd::Zero(r, r));
      const Eigen::MatrixXd shift = K * C;  // (p*r) x r, column i adjusts row i
      for (int j = 1; j <= p; ++j)
        for (int i = 0; i < r; ++i)
          coeffs[size_t(j)].row(i) += shift.block(Eigen::Index(j - 1) * r, i, r, 1).transpose();
      PolyMatrix candidate(std::move(coeffs));
      if (identity_defect(candidate, M) <= tol && is_stable(candidate)) return candidate;
    }
  }
  std::ostringstream os;
  os << "left_inverse: no stable left inverse found up to degree " << max_degree;
  throw NoStableInverseWithinDegree(os.str());
}

}  // namespace singvecm
