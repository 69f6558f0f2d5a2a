#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "singvecm/poly_matrix.hpp"

namespace singvecm {

// One member of a rational reduced-rank I(1) family: r series driven by
// q < r shocks, moving-average polynomial
//   C(L) = xi eta' + (1-L) D + (1-L)^2 E(L),
// filtered by a stable S(L) with S(0) = I. Cointegration rank c = r - q + d.
struct I1FamilySpec {
  int r = 0;
  int q = 0;
  int c = 0;
  int d = 0;
  Eigen::MatrixXd xi;       // r x (r-c), full column rank generically
  Eigen::MatrixXd eta;      // q x (r-c), full column rank generically
  Eigen::MatrixXd D;        // r x q
  PolyMatrix E;             // r x q
  PolyMatrix S;             // r x r, S(0) = I, det roots outside the unit circle
  Eigen::MatrixXd gamma_u;  // q x q innovation covariance, symmetric positive definite

  // Throws std::invalid_argument on structural violations (shapes, S(0) != I,
  // unstable S, gamma_u not SPD); emits warnings (see set_warn_hook) when xi
  // or eta are numerically rank deficient.
  void validate() const;
};

// Derived error-correction objects for a family member:
//   A(L) F_t = h + C0 u_t,  A(0) = I,  A(1) = alpha beta'.
struct GrangerRep {
  Eigen::MatrixXd zeta;     // [xi_perp'; xi'], r x r
  Eigen::MatrixXd xi_perp;  // r x c, orthonormal, xi_perp' xi = 0
  PolyMatrix M;             // r x q
  PolyMatrix N;             // stable left inverse of M
  PolyMatrix A;             // autoregressive polynomial
  PolyMatrix A_star;        // remainder of A(L) = A(1) L + (1-L) A*(L)
  Eigen::MatrixXd alpha;    // r x c loadings
  Eigen::MatrixXd beta;     // r x c cointegration vectors, beta = S(1)' xi_perp
  Eigen::VectorXd h;        // r, deterministic term
  Eigen::VectorXd k;        // c, the free constant (zero by default)
  Eigen::MatrixXd C0;       // r x q impact matrix
};

// Permanent/transitory split of the shocks: v1 = eta_perp' u (d transitory),
// v2 = eta' u (q-d permanent), with
//   C(L) u_t = (1-L) G1(L) v1_t + (xi + (1-L) G2(L)) v2_t.
struct PtDecomp {
  PolyMatrix G1;                 // r x d
  PolyMatrix G2;                 // r x (q-d)
  Eigen::MatrixXd xi;            // r x (q-d)
  Eigen::MatrixXd eta_bar;       // q x (q-d), eta (eta' eta)^-1
  Eigen::MatrixXd eta_perp_bar;  // q x d
  Eigen::MatrixXd eta_perp;      // q x d, orthonormal
};

// Horizon-indexed responses of the differences (U_j) and levels (H_j).
struct IrfSet {
  int horizons = 0;
  std::vector<Eigen::MatrixXd> diff_coeffs;   // U_0 .. U_H
  std::vector<Eigen::MatrixXd> level_coeffs;  // H_j = U_0 + ... + U_j
};

// Orthonormal basis of the orthogonal complement of the column span of B,
// n x (n - m), deterministic given B (empty for square full-rank B, identity
// for an n x 0 input). Throws on rank-deficient input.
Eigen::MatrixXd orth_complement(const Eigen::MatrixXd& B);

// C(L) = xi eta' + (1-L) D + (1-L)^2 E(L).
PolyMatrix build_c_poly(const I1FamilySpec& spec);

// zeta = [xi_perp'; xi'] and the polynomial M(L) with
//   zeta C(L) = diag((1-L) I_c, I_(r-c)) M(L).
// Throws GenericityViolation when zeta is numerically singular.
std::pair<Eigen::MatrixXd, PolyMatrix> build_m_poly(const I1FamilySpec& spec);

// Full error-correction derivation: N = left inverse of M, then
//   A(L) = zeta^-1 N(L) diag(I_c, (1-L) I_(r-c)) zeta S(L),
//   alpha = zeta^-1 N(1) [I_c; 0],  beta = S(1)' xi_perp,  h = A(1) [k; 0].
// k defaults to zero (the zero-constant simulation convention).
GrangerRep granger_rep(const I1FamilySpec& spec, int max_degree = kDefaultLeftInverseDegree,
                       const Eigen::VectorXd& k = Eigen::VectorXd());

// Same construction from a caller-supplied left inverse; N must satisfy
// N(L) M(L) = M(0) for the M of this spec. Lets alternative inverses feed the
// identical downstream pipeline.
GrangerRep granger_rep_with_inverse(const I1FamilySpec& spec, const PolyMatrix& N,
                                    const Eigen::VectorXd& k = Eigen::VectorXd());

PtDecomp pt_decompose(const I1FamilySpec& spec);

// Power-series solution of S(L) U(L) = C(L) up to the horizon, cumulated to
// level responses.
IrfSet theoretical_irf(const I1FamilySpec& spec, int horizons);

// r - rank(xi eta'); warns when it differs from the declared c.
int coint_rank_theoretical(const I1FamilySpec& spec, double tol = kRankTol);

// Zero-frequency spectral density of the differences:
//   (2 pi)^-1 S(1)^-1 C(1) gamma_u C(1)' S(1)^-T,
// symmetric positive semidefinite with rank q - d.
Eigen::MatrixXd spectral_zero(const I1FamilySpec& spec);

// Shocks are fundamental iff C(z) keeps full column rank inside the open unit
// disk; zeros on or outside the circle are allowed.
struct FundamentalnessCheck {
  bool fundamental = false;
  std::vector<std::complex<double>> offending_zeros;
};
FundamentalnessCheck check_fundamental(const I1FamilySpec& spec);

// Stack U_f(L), L U_f(L), ..., L^p U_f(L) into one tall polynomial (q(p+1)
// rows for a q-row U_f) and return the qp sparse vectors t with +1 at h and
// -1 at kq + h; each satisfies t' U(1) = 0.
std::pair<PolyMatrix, std::vector<Eigen::VectorXd>> stacked_representation(const PolyMatrix& Uf,
                                                                           int p);

}  // namespace singvecm
