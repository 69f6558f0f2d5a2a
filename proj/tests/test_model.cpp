#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "singvecm/errors.hpp"
#include "singvecm/model.hpp"
#include "singvecm/rng.hpp"

using namespace singvecm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Two series driven by one shock, (1-L) F_it = (1 + g_i L) u_t. In family
// coordinates: xi = (1+g1, 1+g2)', eta = 1, D = -(g1, g2)', E = 0.
I1FamilySpec two_series(double g1, double g2) {
  I1FamilySpec s;
  s.r = 2;
  s.q = 1;
  s.c = 1;
  s.d = 0;
  s.xi = MatrixXd(2, 1);
  s.xi << 1.0 + g1, 1.0 + g2;
  s.eta = MatrixXd::Ones(1, 1);
  s.D = MatrixXd(2, 1);
  s.D << -g1, -g2;
  s.E = PolyMatrix::zero(2, 1);
  s.S = PolyMatrix::identity(2);
  s.gamma_u = MatrixXd::Identity(1, 1);
  return s;
}

// r series, one shock, (1-L) F_it = (1 + g_i L) u_t.
I1FamilySpec one_shock(const VectorXd& g) {
  I1FamilySpec s;
  const int r = int(g.size());
  s.r = r;
  s.q = 1;
  s.d = 0;
  s.c = r - 1;
  s.xi = VectorXd::Ones(r) + g;
  s.eta = MatrixXd::Ones(1, 1);
  s.D = -g;
  s.E = PolyMatrix::zero(r, 1);
  s.S = PolyMatrix::identity(r);
  s.gamma_u = MatrixXd::Identity(1, 1);
  return s;
}

I1FamilySpec random_family(CounterRng& rng, int r, int q, int d) {
  I1FamilySpec s;
  s.r = r;
  s.q = q;
  s.d = d;
  s.c = r - q + d;
  const int w = r - s.c;
  auto mat = [&](int rows, int cols, double scale) {
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.uniform(-1.0, 1.0);
    return m;
  };
  s.xi = mat(r, w, 1.0);
  s.eta = mat(q, w, 1.0);
  s.D = mat(r, q, 0.7);
  const int edeg = int(rng.uniform_index(3));
  std::vector<MatrixXd> ec;
  for (int k = 0; k <= edeg; ++k) ec.push_back(mat(r, q, 0.35));
  s.E = PolyMatrix(std::move(ec));
  s.S = PolyMatrix({MatrixXd::Identity(r, r), mat(r, r, 0.25 / r)});
  const MatrixXd w0 = mat(q, q, 1.0);
  s.gamma_u = w0 * w0.transpose() + 0.5 * MatrixXd::Identity(q, q);
  return s;
}

// diag((1-L) I_c, I_(r-c)) as a matrix polynomial.
PolyMatrix diff_top_block(int r, int c) {
  MatrixXd k = MatrixXd::Zero(r, r);
  k.topLeftCorner(c, c).setIdentity();
  return PolyMatrix({MatrixXd::Identity(r, r), -k});
}

// Coefficient of L^j in A(L) * sum_i U_i L^i.
MatrixXd conv_coeff(const PolyMatrix& A, const std::vector<MatrixXd>& U, int j) {
  MatrixXd acc = MatrixXd::Zero(A.rows(), int(U[0].cols()));
  for (int i = 0; i <= std::min(j, A.degree()); ++i)
    if (j - i < int(U.size())) acc += A.coeff(i) * U[size_t(j - i)];
  return acc;
}

// Power-series inverse of A(L) with A(0) = I, truncated at the horizon.
std::vector<MatrixXd> invert_ar(const PolyMatrix& A, int horizon) {
  std::vector<MatrixXd> K{MatrixXd::Identity(A.rows(), A.rows())};
  for (int j = 1; j <= horizon; ++j) {
    MatrixXd acc = MatrixXd::Zero(A.rows(), A.rows());
    for (int i = 1; i <= std::min(j, A.degree()); ++i) acc -= A.coeff(i) * K[size_t(j - i)];
    K.push_back(std::move(acc));
  }
  return K;
}

int svd_rank(const MatrixXd& m, double tol = 1e-8) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * sv[0]) ++rank;
  return rank;
}

}  // namespace

TEST_CASE("orthogonal complement") {
  MatrixXd b(3, 1);
  b << 1.0, 1.0, 1.0;
  const MatrixXd q = orth_complement(b);
  REQUIRE(q.rows() == 3);
  REQUIRE(q.cols() == 2);
  CHECK((q.transpose() * q - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((q.transpose() * b).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK(orth_complement(MatrixXd(3, 0)).isApprox(MatrixXd::Identity(3, 3)));
  CHECK(orth_complement(MatrixXd::Identity(2, 2)).cols() == 0);

  MatrixXd rank1(3, 2);
  rank1 << 1.0, 2.0, 1.0, 2.0, 1.0, 2.0;
  CHECK_THROWS_AS(orth_complement(rank1), std::invalid_argument);
  CHECK_THROWS_AS(orth_complement(MatrixXd::Ones(2, 3)), std::invalid_argument);
}

TEST_CASE("two-series family assembles the advertised moving average") {
  for (auto [g1, g2] : {std::pair{0.5, -0.5}, std::pair{0.3, 0.8}, std::pair{-0.2, 0.6}}) {
    const I1FamilySpec spec = two_series(g1, g2);
    spec.validate();
    const PolyMatrix c = build_c_poly(spec);
    MatrixXd c0(2, 1), c1(2, 1);
    c0 << 1.0, 1.0;
    c1 << g1, g2;
    CHECK(max_coeff_diff(c, PolyMatrix({c0, c1})) <= 1e-14);
    CHECK(coint_rank_theoretical(spec) == 1);
  }
}

TEST_CASE("family validation rejects malformed members") {
  I1FamilySpec ok = two_series(0.5, -0.5);
  CHECK_NOTHROW(ok.validate());

  I1FamilySpec bad = ok;
  bad.d = 1;  // inconsistent with c = r - q + d
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.xi = MatrixXd::Ones(3, 1);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.S = PolyMatrix(MatrixXd(2.0 * MatrixXd::Identity(2, 2)));
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = ok;  // unit root in S is not allowed
  bad.S = PolyMatrix({MatrixXd::Identity(2, 2), MatrixXd(-1.2 * MatrixXd::Identity(2, 2))});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.gamma_u = MatrixXd(-MatrixXd::Identity(1, 1));
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("numerator polynomial factorizes the moving average") {
  // zeta C(L) = diag((1-L) I_c, I_(r-c)) M(L) coefficient by coefficient.
  CounterRng rng(0x4d4f44454cULL, 7);
  int checked = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const int r = 3 + int(rng.uniform_index(3));
    const int q = 1 + int(rng.uniform_index(r - 1));
    const int d = int(rng.uniform_index(q));
    const I1FamilySpec spec = random_family(rng, r, q, d);
    spec.validate();
    auto [zeta, m] = build_m_poly(spec);
    const PolyMatrix lhs = multiply(PolyMatrix(zeta), build_c_poly(spec));
    const PolyMatrix rhs = multiply(diff_top_block(r, spec.c), m);
    CHECK(max_coeff_diff(lhs, rhs) <= 1e-12 * std::max(1.0, m.max_abs()));
    CHECK(coint_rank_theoretical(spec) == spec.c);
    ++checked;
  }
  CHECK(checked == 24);
}

TEST_CASE("error-correction representation of the two-series family") {
  const I1FamilySpec spec = two_series(0.5, -0.5);
  const GrangerRep rep = granger_rep(spec);

  CHECK((rep.A.coeff(0) - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

  const MatrixXd a1 = eval(rep.A, 1.0);
  CHECK((a1 - rep.alpha * rep.beta.transpose()).cwiseAbs().maxCoeff() <= 1e-10);

  // The cointegration vector is proportional to (0.5, -1.5).
  REQUIRE(rep.beta.rows() == 2);
  REQUIRE(rep.beta.cols() == 1);
  CHECK(std::abs(rep.beta(0, 0) * (-1.5) - rep.beta(1, 0) * 0.5) <=
        1e-12 * rep.beta.cwiseAbs().maxCoeff());

  // Impact matrix equals the zero-lag moving-average coefficient.
  MatrixXd c0(2, 1);
  c0 << 1.0, 1.0;
  CHECK((rep.C0 - c0).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((rep.zeta * rep.C0 - rep.M.coeff(0)).cwiseAbs().maxCoeff() <= 1e-12);

  // No constant by default.
  CHECK(rep.h.cwiseAbs().maxCoeff() == 0.0);

  // A(L) = A(1) L + (1-L) A*(L).
  const PolyMatrix recomposed =
      add(PolyMatrix({MatrixXd::Zero(2, 2), a1}),
          scalar_multiply(Polynomial({1.0, -1.0}), rep.A_star));
  CHECK(max_coeff_diff(recomposed, rep.A) <= 1e-12);

  // Applying A(L) to the difference responses telescopes to (1-L) C0.
  const IrfSet irf = theoretical_irf(spec, 60);
  CHECK((conv_coeff(rep.A, irf.diff_coeffs, 0) - rep.C0).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((conv_coeff(rep.A, irf.diff_coeffs, 1) + rep.C0).cwiseAbs().maxCoeff() <= 1e-10);
  for (int j = 2; j <= 50; ++j)
    CHECK(conv_coeff(rep.A, irf.diff_coeffs, j).cwiseAbs().maxCoeff() <= 1e-10);

  // An explicit constant enters through h = A(1) (k', 0')'.
  VectorXd k(1);
  k << 2.0;
  const GrangerRep shifted = granger_rep(spec, kDefaultLeftInverseDegree, k);
  const VectorXd expected = shifted.alpha * (shifted.beta.transpose().col(0) * 2.0);
  CHECK((shifted.h - expected).cwiseAbs().maxCoeff() <= 1e-10);
  VectorXd wrong(2);
  wrong << 1.0, 1.0;
  CHECK_THROWS_AS(granger_rep(spec, kDefaultLeftInverseDegree, wrong), std::invalid_argument);
}

TEST_CASE("autoregressive pipeline identities hold on random members") {
  CounterRng rng(0x4d4f44454cULL, 11);
  int done = 0;
  for (int trial = 0; trial < 16; ++trial) {
    const int r = 3 + int(rng.uniform_index(3));
    const int q = 1 + int(rng.uniform_index(r - 1));
    const int d = int(rng.uniform_index(q));
    const I1FamilySpec spec = random_family(rng, r, q, d);
    GrangerRep rep;
    try {
      rep = granger_rep(spec, 16);
    } catch (const NoStableInverseWithinDegree&) {
      continue;
    } catch (const NotZeroless&) {
      continue;
    }
    const double scale = std::max(1.0, rep.A.max_abs());
    CHECK((rep.A.coeff(0) - MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() <= 1e-9 * scale);
    CHECK((eval(rep.A, 1.0) - rep.alpha * rep.beta.transpose()).cwiseAbs().maxCoeff() <=
          1e-8 * scale);
    CHECK((rep.C0 - build_c_poly(spec).coeff(0)).cwiseAbs().maxCoeff() <= 1e-8 * scale);

    const IrfSet irf = theoretical_irf(spec, 40);
    double worst = 0.0;
    for (int j = 2; j <= 40; ++j)
      worst = std::max(worst, conv_coeff(rep.A, irf.diff_coeffs, j).cwiseAbs().maxCoeff());
    CHECK((conv_coeff(rep.A, irf.diff_coeffs, 0) - rep.C0).cwiseAbs().maxCoeff() <= 1e-7 * scale);
    CHECK((conv_coeff(rep.A, irf.diff_coeffs, 1) + rep.C0).cwiseAbs().maxCoeff() <= 1e-7 * scale);
    CHECK(worst <= 1e-7 * scale);
    ++done;
  }
  CHECK(done >= 12);
}

TEST_CASE("level responses do not depend on the chosen left inverse") {
  VectorXd g(3);
  g << 0.3, 0.5, 0.7;
  const I1FamilySpec spec = one_shock(g);
  const GrangerRep rep1 = granger_rep(spec);

  // Build a second, genuinely different inverse of the same numerator by a
  // kernel shift, then push it through the identical pipeline.
  auto [zeta, m] = build_m_poly(spec);
  const int p = std::max(1, rep1.N.degree());
  const auto sols = left_inverse_at_degree(m, p);
  REQUIRE(sols.residual <= 1e-10);
  REQUIRE(!sols.kernel.empty());
  std::vector<MatrixXd> coeffs = sols.particular.coeffs();
  coeffs.resize(size_t(p) + 1, MatrixXd::Zero(3, 3));
  for (int row = 0; row < 3; ++row)
    for (size_t j = 1; j < coeffs.size(); ++j)
      coeffs[j].row(row) +=
          (0.11 * (row + 1)) * sols.kernel[0].segment(Eigen::Index(j - 1) * 3, 3).transpose();
  const PolyMatrix n2(coeffs);
  REQUIRE(max_coeff_diff(multiply(n2, m), PolyMatrix(MatrixXd(m.coeff(0)))) <= 1e-9);
  REQUIRE(max_coeff_diff(n2, rep1.N) > 1e-3);  // really a different inverse
  if (!is_stable(n2)) return;                  // stability of the shift is not guaranteed

  const GrangerRep rep2 = granger_rep_with_inverse(spec, n2);
  CHECK((rep1.C0 - rep2.C0).cwiseAbs().maxCoeff() <= 1e-12);

  const IrfSet irf = theoretical_irf(spec, 50);
  const auto k1 = invert_ar(rep1.A, 50);
  const auto k2 = invert_ar(rep2.A, 50);
  for (int j = 0; j <= 50; ++j) {
    const MatrixXd h1 = k1[size_t(j)] * rep1.C0;
    const MatrixXd h2 = k2[size_t(j)] * rep2.C0;
    CHECK((h1 - h2).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((h1 - irf.level_coeffs[size_t(j)]).cwiseAbs().maxCoeff() <= 1e-10);
  }

  // Garbage inverses are rejected.
  std::vector<MatrixXd> junk = rep1.N.coeffs();
  junk.push_back(MatrixXd::Ones(3, 3));
  CHECK_THROWS_AS(granger_rep_with_inverse(spec, PolyMatrix(junk)), std::invalid_argument);
}

TEST_CASE("permanent and transitory split reconstructs the moving average") {
  CounterRng rng(0x4d4f44454cULL, 13);
  for (int trial = 0; trial < 10; ++trial) {
    const int r = 3 + int(rng.uniform_index(3));
    const int q = 2 + int(rng.uniform_index(r - 2));
    const int d = int(rng.uniform_index(q));
    const I1FamilySpec spec = random_family(rng, r, q, d);
    const PtDecomp pt = pt_decompose(spec);

    REQUIRE(pt.eta_perp.cols() == d);
    REQUIRE(pt.G1.cols() == d);
    REQUIRE(pt.G2.cols() == q - d);

    // eta_perp_bar eta_perp' + eta_bar eta' = I_q.
    const MatrixXd proj = pt.eta_perp_bar * pt.eta_perp.transpose() +
                          pt.eta_bar * spec.eta.transpose();
    CHECK((proj - MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff() <= 1e-12);

    // (1-L) G1 eta_perp' + (xi + (1-L) G2) eta' = C(L).
    const Polynomial diff({1.0, -1.0});
    const PolyMatrix lhs =
        add(scalar_multiply(diff, multiply(pt.G1, PolyMatrix(MatrixXd(pt.eta_perp.transpose())))),
            multiply(add(PolyMatrix(spec.xi), scalar_multiply(diff, pt.G2)),
                     PolyMatrix(MatrixXd(spec.eta.transpose()))));
    const PolyMatrix c = build_c_poly(spec);
    CHECK(max_coeff_diff(lhs, c) <= 1e-12 * std::max(1.0, c.max_abs()));
  }

  // All shocks permanent: the transitory block is empty and the identity holds.
  const I1FamilySpec spec0 = two_series(0.4, -0.3);
  const PtDecomp pt0 = pt_decompose(spec0);
  CHECK(pt0.G1.cols() == 0);
  const PolyMatrix lhs0 = multiply(
      add(PolyMatrix(spec0.xi), scalar_multiply(Polynomial({1.0, -1.0}), pt0.G2)),
      PolyMatrix(MatrixXd(spec0.eta.transpose())));
  CHECK(max_coeff_diff(lhs0, build_c_poly(spec0)) <= 1e-13);
}

TEST_CASE("difference and level responses against a closed form") {
  // S(L) = (1 - 0.5 L) I gives U_j = 0.5^j C_0 + 0.5^(j-1) C_1 for j >= 1.
  I1FamilySpec spec = two_series(0.5, -0.5);
  spec.S = PolyMatrix({MatrixXd::Identity(2, 2), MatrixXd(-0.5 * MatrixXd::Identity(2, 2))});
  const IrfSet irf = theoretical_irf(spec, 200);
  REQUIRE(int(irf.diff_coeffs.size()) == 201);

  MatrixXd c0(2, 1), c1(2, 1);
  c0 << 1.0, 1.0;
  c1 << 0.5, -0.5;
  CHECK((irf.diff_coeffs[0] - c0).cwiseAbs().maxCoeff() <= 1e-14);
  for (int j = 1; j <= 20; ++j) {
    const MatrixXd want = std::pow(0.5, j) * c0 + std::pow(0.5, j - 1) * c1;
    CHECK((irf.diff_coeffs[size_t(j)] - want).cwiseAbs().maxCoeff() <= 1e-13);
  }

  // Levels converge to S(1)^-1 xi eta' = 2 xi.
  MatrixXd limit(2, 1);
  limit << 3.0, 1.0;
  CHECK((irf.level_coeffs[200] - limit).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((irf.level_coeffs[5] - (irf.level_coeffs[4] + irf.diff_coeffs[5])).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("zero-frequency spectral density is singular along the cointegration space") {
  CounterRng rng(0x4d4f44454cULL, 17);
  for (int trial = 0; trial < 8; ++trial) {
    const int r = 3 + int(rng.uniform_index(3));
    const int q = 2 + int(rng.uniform_index(r - 2));
    const int d = 1 + int(rng.uniform_index(q - 1));
    const I1FamilySpec spec = random_family(rng, r, q, d);
    const MatrixXd sigma = spectral_zero(spec);

    REQUIRE(sigma.rows() == r);
    CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(svd_rank(sigma) == q - d);

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()));

    const MatrixXd beta = eval(spec.S, 1.0).transpose() * orth_complement(spec.xi);
    CHECK((beta.transpose() * sigma * beta).cwiseAbs().maxCoeff() <=
          1e-10 * std::max(1.0, sigma.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("shock recovery from past observations") {
  // Zeros strictly inside the unit circle break recoverability; zeros on or
  // outside it do not.
  CHECK(check_fundamental(two_series(0.5, -0.5)).fundamental);
  CHECK(check_fundamental(two_series(1.0, -1.0)).fundamental);  // unit-circle zero is fine

  // (1-L) F_t = (1 + 2L, (1+2L)(1+0.3L))' u_t has a common zero at -1/2.
  I1FamilySpec bad;
  bad.r = 2;
  bad.q = 1;
  bad.c = 1;
  bad.d = 0;
  bad.xi = MatrixXd(2, 1);
  bad.xi << 3.0, 3.9;
  bad.eta = MatrixXd::Ones(1, 1);
  bad.D = MatrixXd(2, 1);
  bad.D << -2.0, -3.5;
  MatrixXd e0(2, 1);
  e0 << 0.0, 0.6;
  bad.E = PolyMatrix(e0);
  bad.S = PolyMatrix::identity(2);
  bad.gamma_u = MatrixXd::Identity(1, 1);

  MatrixXd c0(2, 1), c1(2, 1), c2(2, 1);
  c0 << 1.0, 1.0;
  c1 << 2.0, 2.3;
  c2 << 0.0, 0.6;
  CHECK(max_coeff_diff(build_c_poly(bad), PolyMatrix({c0, c1, c2})) <= 1e-13);

  const FundamentalnessCheck fc = check_fundamental(bad);
  CHECK(!fc.fundamental);
  REQUIRE(fc.offending_zeros.size() == 1);
  CHECK(std::abs(fc.offending_zeros[0] - std::complex<double>(-0.5, 0.0)) <= 1e-8);
}

TEST_CASE("stacked copies of a low-dimensional family") {
  // One series, one lagged copy: U = (1, L)', one pairwise difference vector.
  const auto [u1, t1] = stacked_representation(PolyMatrix(MatrixXd::Ones(1, 1)), 1);
  REQUIRE(u1.rows() == 2);
  REQUIRE(t1.size() == 1);
  CHECK(u1.coeff(0)(0, 0) == 1.0);
  CHECK(u1.coeff(0)(1, 0) == 0.0);
  CHECK(u1.coeff(1)(1, 0) == 1.0);
  CHECK(t1[0](0) == 1.0);
  CHECK(t1[0](1) == -1.0);

  CounterRng rng(0x4d4f44454cULL, 19);
  MatrixXd f0(2, 2), f1(2, 2), f2(2, 2);
  for (auto* m : {&f0, &f1, &f2})
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) (*m)(i, j) = rng.uniform(-1.0, 1.0);
  const PolyMatrix uf({f0, f1, f2});
  const auto [u, trivial] = stacked_representation(uf, 2);
  REQUIRE(u.rows() == 6);
  REQUIRE(int(trivial.size()) == 4);  // q * p

  const std::complex<double> z(0.7, 0.2);
  const Eigen::MatrixXcd uz = eval(u, z);
  const Eigen::MatrixXcd ufz = eval(uf, z);
  for (const auto& t : trivial) {
    // t has +1 at series h in the contemporaneous block, -1 at its k-lagged
    // copy, so t' U(z) = (1 - z^k) row_h(U_f(z)) and t' U(1) = 0.
    int h = -1, lag = 0;
    for (int i = 0; i < 6; ++i) {
      if (t(i) == 1.0) h = i;
      if (t(i) == -1.0) lag = i / 2;
    }
    REQUIRE(h >= 0);
    const Eigen::RowVectorXcd got = t.transpose().cast<std::complex<double>>() * uz;
    const Eigen::RowVectorXcd want = (1.0 - std::pow(z, lag)) * ufz.row(h);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((t.transpose() * eval(u, 1.0)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  CHECK_THROWS_AS(stacked_representation(uf, 0), std::invalid_argument);
}
