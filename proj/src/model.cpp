#include "singvecm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "singvecm/errors.hpp"

namespace singvecm {

namespace {

int numerical_rank(const Eigen::MatrixXd& A, double tol = kRankTol) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * sv[0];
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff && sv[i] > 0.0) ++rank;
  return rank;
}

// zeta^-1 applied coefficient-wise.
PolyMatrix solve_left(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, const PolyMatrix& P) {
  std::vector<Eigen::MatrixXd> c;
  c.reserve(size_t(P.degree()) + 1);
  for (int k = 0; k <= P.degree(); ++k) c.push_back(lu.solve(P.coeff(k)));
  return PolyMatrix(std::move(c));
}

}  // namespace

void I1FamilySpec::validate() const {
  if (!(r > q && q > 0)) throw std::invalid_argument("family: needs r > q > 0");
  if (!(r > c && c >= r - q)) throw std::invalid_argument("family: needs r > c >= r - q");
  if (d != c - (r - q)) throw std::invalid_argument("family: d must equal c - (r - q)");
  const int w = r - c;
  if (xi.rows() != r || xi.cols() != w) throw std::invalid_argument("family: xi must be r x (r-c)");
  if (eta.rows() != q || eta.cols() != w)
    throw std::invalid_argument("family: eta must be q x (r-c)");
  if (D.rows() != r || D.cols() != q) throw std::invalid_argument("family: D must be r x q");
  if (E.rows() != r || E.cols() != q) throw std::invalid_argument("family: E must be r x q");
  if (S.rows() != r || S.cols() != r) throw std::invalid_argument("family: S must be r x r");
  if (gamma_u.rows() != q || gamma_u.cols() != q)
    throw std::invalid_argument("family: gamma_u must be q x q");
  if (!S.coeff(0).isApprox(Eigen::MatrixXd::Identity(r, r), 1e-12))
    throw std::invalid_argument("family: S(0) must be the identity");
  if (!is_stable(S, 0.0)) throw std::invalid_argument("family: det S has roots inside the closed unit disk");
  if (!gamma_u.isApprox(gamma_u.transpose(), 1e-10))
    throw std::invalid_argument("family: gamma_u must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(gamma_u);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("family: gamma_u must be positive definite");
  if (numerical_rank(xi) < w) warn("family: xi is numerically rank deficient (non-generic point)");
  if (numerical_rank(eta) < w)
    warn("family: eta is numerically rank deficient (non-generic point)");
}

Eigen::MatrixXd orth_complement(const Eigen::MatrixXd& B) {
  const int n = int(B.rows()), m = int(B.cols());
  if (m == 0) return Eigen::MatrixXd::Identity(n, n);
  if (m > n)
    throw std::invalid_argument("orth_complement: matrix has more columns than rows");
  if (numerical_rank(B) < m) throw std::invalid_argument("orth_complement: rank-deficient input");
  if (m == n) return Eigen::MatrixXd(n, 0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(n - m);
}

PolyMatrix build_c_poly(const I1FamilySpec& spec) {
  const Polynomial diff({1.0, -1.0});
  PolyMatrix c = add(PolyMatrix(Eigen::MatrixXd(spec.xi * spec.eta.transpose())),
                     scalar_multiply(diff, PolyMatrix(spec.D)));
  return add(c, scalar_multiply(multiply(diff, diff), spec.E));
}

std::pair<Eigen::MatrixXd, PolyMatrix> build_m_poly(const I1FamilySpec& spec) {
  const int r = spec.r, c = spec.c;
  const Eigen::MatrixXd xi_perp = orth_complement(spec.xi);
  Eigen::MatrixXd zeta(r, r);
  zeta.topRows(c) = xi_perp.transpose();
  zeta.bottomRows(r - c) = spec.xi.transpose();
  if (numerical_rank(zeta) < r)
    throw GenericityViolation("build_m_poly: zeta is numerically singular");

  // M(L) = [xi_perp' D; xi' xi eta'] + (1-L) [xi_perp' E; xi' D]
  //        + (1-L)^2 [0; xi' E].
  const Polynomial diff({1.0, -1.0});
  auto stack = [&](const PolyMatrix& top, const PolyMatrix& bottom) {
    std::vector<Eigen::MatrixXd> coeffs;
    const int deg = std::max(top.degree(), bottom.degree());
    for (int k = 0; k <= deg; ++k) {
      Eigen::MatrixXd m(r, spec.q);
      m.topRows(c) = top.coeff_or_zero(k);
      m.bottomRows(r - c) = bottom.coeff_or_zero(k);
      coeffs.push_back(std::move(m));
    }
    return PolyMatrix(std::move(coeffs));
  };
  const PolyMatrix xiperpE = multiply(PolyMatrix(Eigen::MatrixXd(xi_perp.transpose())), spec.E);
  const PolyMatrix xiE = multiply(PolyMatrix(Eigen::MatrixXd(spec.xi.transpose())), spec.E);
  const PolyMatrix term0 =
      stack(PolyMatrix(Eigen::MatrixXd(xi_perp.transpose() * spec.D)),
            PolyMatrix(Eigen::MatrixXd(spec.xi.transpose() * spec.xi * spec.eta.transpose())));
  const PolyMatrix term1 =
      scalar_multiply(diff, stack(xiperpE, PolyMatrix(Eigen::MatrixXd(spec.xi.transpose() * spec.D))));
  const PolyMatrix term2 =
      scalar_multiply(multiply(diff, diff), stack(PolyMatrix::zero(c, spec.q), xiE));
  return {zeta, add(add(term0, term1), term2)};
}

GrangerRep granger_rep_with_inverse(const I1FamilySpec& spec, const PolyMatrix& N,
                                    const Eigen::VectorXd& k) {
  spec.validate();
  const int r = spec.r, c = spec.c;
  auto [zeta, M] = build_m_poly(spec);
  if (N.rows() != r || N.cols() != r)
    throw std::invalid_argument("granger_rep_with_inverse: N must be r x r");
  if (!N.coeff(0).isApprox(Eigen::MatrixXd::Identity(r, r), 1e-9))
    throw std::invalid_argument("granger_rep_with_inverse: N(0) must be the identity");
  if (max_coeff_diff(multiply(N, M), PolyMatrix(Eigen::MatrixXd(M.coeff(0)))) >
      1e-6 * std::max(1.0, M.max_abs()))
    throw std::invalid_argument("granger_rep_with_inverse: N(L) M(L) != M(0)");
  const Eigen::MatrixXd xi_perp = zeta.topRows(c).transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> zeta_lu(zeta);

  // diag(I_c, (1-L) I_(r-c)) = I - L J with J = diag(0, I_(r-c)).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(r, r);
  J.bottomRightCorner(r - c, r - c).setIdentity();
  const PolyMatrix delta({Eigen::MatrixXd::Identity(r, r), -J});

  const PolyMatrix inner = multiply(multiply(N, delta), multiply(PolyMatrix(zeta), spec.S));
  const PolyMatrix A = solve_left(zeta_lu, inner);

  GrangerRep rep;
  rep.zeta = zeta;
  rep.xi_perp = xi_perp;
  rep.M = M;
  rep.N = N;
  rep.A = A;
  auto split = bn_split(A, BnMode::Lagged);
  rep.A_star = std::move(split.second);
  rep.alpha = zeta_lu.solve(Eigen::MatrixXd(eval(N, 1.0).leftCols(c)));
  rep.beta = eval(spec.S, 1.0).transpose() * xi_perp;
  rep.k = k.size() ? k : Eigen::VectorXd::Zero(c);
  if (rep.k.size() != c) throw std::invalid_argument("granger_rep: k must have length c");
  Eigen::VectorXd k_full = Eigen::VectorXd::Zero(r);
  k_full.head(c) = rep.k;
  rep.h = split.first * k_full;
  rep.C0 = zeta_lu.solve(M.coeff(0));
  return rep;
}

GrangerRep granger_rep(const I1FamilySpec& spec, int max_degree, const Eigen::VectorXd& k) {
  spec.validate();
  auto [zeta, M] = build_m_poly(spec);
  (void)zeta;
  const PolyMatrix N = left_inverse(M, max_degree);
  return granger_rep_with_inverse(spec, N, k);
}

PtDecomp pt_decompose(const I1FamilySpec& spec) {
  spec.validate();
  PtDecomp pt;
  pt.eta_perp = orth_complement(spec.eta);  // q x d
  pt.eta_bar = spec.eta * (spec.eta.transpose() * spec.eta).inverse();
  pt.eta_perp_bar =
      pt.eta_perp.cols() > 0
          ? Eigen::MatrixXd(pt.eta_perp * (pt.eta_perp.transpose() * pt.eta_perp).inverse())
          : pt.eta_perp;
  pt.xi = spec.xi;
  const PolyMatrix de = add(PolyMatrix(spec.D), scalar_multiply(Polynomial({1.0, -1.0}), spec.E));
  pt.G1 = multiply(de, PolyMatrix(pt.eta_perp_bar));
  pt.G2 = multiply(de, PolyMatrix(pt.eta_bar));
  return pt;
}

IrfSet theoretical_irf(const I1FamilySpec& spec, int horizons) {
  if (horizons < 0) throw std::invalid_argument("theoretical_irf: negative horizon");
  spec.validate();
  const PolyMatrix C = build_c_poly(spec);
  IrfSet irf;
  irf.horizons = horizons;
  irf.diff_coeffs.reserve(size_t(horizons) + 1);
  irf.level_coeffs.reserve(size_t(horizons) + 1);
  for (int j = 0; j <= horizons; ++j) {
    Eigen::MatrixXd u = C.coeff_or_zero(j);
    for (int i = 1; i <= std::min(j, spec.S.degree()); ++i)
      u -= spec.S.coeff(i) * irf.diff_coeffs[size_t(j - i)];
    irf.diff_coeffs.push_back(u);
    irf.level_coeffs.push_back(j == 0 ? irf.diff_coeffs[0]
                                      : Eigen::MatrixXd(irf.level_coeffs[size_t(j - 1)] + u));
  }
  return irf;
}

int coint_rank_theoretical(const I1FamilySpec& spec, double tol) {
  const int rank = numerical_rank(spec.xi * spec.eta.transpose(), tol);
  const int c_hat = spec.r - rank;
  if (c_hat != spec.c) {
    std::ostringstream os;
    os << "coint_rank_theoretical: computed rank " << c_hat << " differs from declared " << spec.c
       << " (non-generic point)";
    warn(os.str());
  }
  return c_hat;
}

Eigen::MatrixXd spectral_zero(const I1FamilySpec& spec) {
  spec.validate();
  const Eigen::MatrixXd S1 = eval(spec.S, 1.0);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(S1);
  if (std::abs(lu.determinant()) < 1e-300)
    throw std::invalid_argument("spectral_zero: S(1) is singular");
  const Eigen::MatrixXd X = lu.solve(spec.xi * spec.eta.transpose());
  Eigen::MatrixXd sigma = X * spec.gamma_u * X.transpose() / (2.0 * std::numbers::pi);
  return (sigma + sigma.transpose()) / 2.0;
}

FundamentalnessCheck check_fundamental(const I1FamilySpec& spec) {
  spec.validate();
  const PolyMatrix C = build_c_poly(spec);
  FundamentalnessCheck out;
  out.fundamental = true;
  for (const auto& [z, rank] : rank_drop_candidates(C, kRankTol)) {
    if (rank >= spec.q) continue;
    if (std::abs(z) < 1.0 - 1e-12) {
      out.fundamental = false;
      out.offending_zeros.push_back(z);
    }
  }
  return out;
}

std::pair<PolyMatrix, std::vector<Eigen::VectorXd>> stacked_representation(const PolyMatrix& Uf,
                                                                           int p) {
  if (p < 1) throw std::invalid_argument("stacked_representation: p must be at least 1");
  const int q = Uf.rows();
  const int r = q * (p + 1);
  std::vector<Eigen::MatrixXd> coeffs;
  const int deg = Uf.degree() + p;
  coeffs.reserve(size_t(deg) + 1);
  for (int k = 0; k <= deg; ++k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, Uf.cols());
    for (int b = 0; b <= p; ++b) m.middleRows(Eigen::Index(b) * q, q) = Uf.coeff_or_zero(k - b);
    coeffs.push_back(std::move(m));
  }
  std::vector<Eigen::VectorXd> trivial;
  trivial.reserve(size_t(q) * size_t(p));
  for (int k = 1; k <= p; ++k)
    for (int h = 1; h <= q; ++h) {
      Eigen::VectorXd t = Eigen::VectorXd::Zero(r);
      t[h - 1] = 1.0;
      t[Eigen::Index(k) * q + h - 1] = -1.0;
      trivial.push_back(std::move(t));
    }
  return {PolyMatrix(std::move(coeffs)), std::move(trivial)};
}

}  // namespace singvecm
