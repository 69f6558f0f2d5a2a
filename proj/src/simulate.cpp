#include "singvecm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "singvecm/errors.hpp"
#include "singvecm/rng.hpp"

namespace singvecm {

namespace {

int numerical_rank(const Eigen::MatrixXd& A, double tol = kRankTol) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv[0] == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * sv[0]) ++rank;
  return rank;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw EigenFailure("spectral_radius: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd haar_orthogonal(int n, CounterRng& rng) {
  Eigen::MatrixXd z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fixing the signs of Q's columns by R's diagonal makes the distribution
  // Haar and the result unique.
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

// Verify absence of roots strictly inside the unit circle (cointegration
// unit roots sit on it; anything inside makes the recursion explosive).
void check_not_explosive(const PolyMatrix& A) {
  const Polynomial det = det_poly(A);
  if (det.is_zero()) throw ExplosiveSystem("simulate_factors: det A(L) vanishes identically");
  if (det.degree() == 0) return;
  for (const auto& z : poly_roots(det))
    if (std::abs(z) < 1.0 - 1e-6) {
      std::ostringstream os;
      os << "simulate_factors: det A has root of modulus " << std::abs(z)
         << " inside the unit circle";
      throw ExplosiveSystem(os.str());
    }
}

SimPath run_recursion(const PolyMatrix& A, const Eigen::VectorXd& h, const Eigen::MatrixXd& C0,
                      const Eigen::MatrixXd& gamma_u, int T, int burn_in, std::uint64_t seed,
                      std::uint64_t stream) {
  const int r = A.rows();
  const int q = int(C0.cols());
  if (T < 1) throw std::invalid_argument("simulate_factors: T must be positive");
  if (burn_in < 0) throw std::invalid_argument("simulate_factors: negative burn-in");
  if (A.cols() != r || C0.rows() != r)
    throw std::invalid_argument("simulate_factors: shape mismatch");
  Eigen::VectorXd h_eff = h.size() ? h : Eigen::VectorXd::Zero(r);
  if (h_eff.size() != r) throw std::invalid_argument("simulate_factors: h must have length r");
  check_not_explosive(A);

  Eigen::MatrixXd chol;
  if (gamma_u.size() == 0) {
    chol = Eigen::MatrixXd::Identity(q, q);
  } else {
    if (gamma_u.rows() != q || gamma_u.cols() != q)
      throw std::invalid_argument("simulate_factors: gamma_u must be q x q");
    if (gamma_u.isZero(0.0)) {
      chol = Eigen::MatrixXd::Zero(q, q);
    } else {
      Eigen::LLT<Eigen::MatrixXd> llt(gamma_u);
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument("simulate_factors: gamma_u must be positive definite");
      chol = llt.matrixL();
    }
  }

  const int total = burn_in + T;
  CounterRng rng(seed, stream);
  SimPath path;
  path.T = T;
  path.burn_in = burn_in;
  path.W = Eigen::VectorXd::Zero(r);
  path.u_full.resize(total, q);
  path.F_full.resize(total, r);
  Eigen::VectorXd w(q);
  for (int t = 0; t < total; ++t) {
    for (int j = 0; j < q; ++j) w[j] = rng.gaussian();
    path.u_full.row(t) = (chol * w).transpose();
  }
  const int deg = A.degree();
  for (int t = 0; t < total; ++t) {
    Eigen::VectorXd f = h_eff + C0 * path.u_full.row(t).transpose();
    for (int i = 1; i <= std::min(deg, t); ++i)
      f -= A.coeff(i) * path.F_full.row(t - i).transpose();
    path.F_full.row(t) = f.transpose();
  }
  if (!path.F_full.allFinite())
    throw ExplosiveSystem("simulate_factors: path overflowed to non-finite values");
  return path;
}

}  // namespace

void PanelSpec::validate(int r) const {
  if (n < r) throw std::invalid_argument("panel: needs at least as many series as factors");
  if (Lambda.rows() != n || Lambda.cols() != r)
    throw std::invalid_argument("panel: Lambda must be n x r");
  if (int(idio_order.size()) != n || idio_ar.size() != n || idio_scale.size() != n)
    throw std::invalid_argument("panel: per-series idiosyncratic fields must have length n");
  for (int j = 0; j < n; ++j) {
    if (idio_scale[j] < 0.0) throw std::invalid_argument("panel: negative innovation scale");
    if (idio_order[size_t(j)] == IdioKind::Ar && std::abs(idio_ar[j]) >= 1.0)
      throw std::invalid_argument("panel: AR coefficient must have modulus < 1");
  }
}

DgpDraw draw_dgp(std::uint64_t seed) {
  CounterRng rng(seed, 0);
  DgpDraw draw;
  draw.seed = seed;

  // Stable factor: diagonal entries uniform on (0.5, 0.8), off-diagonal on
  // (0, 0.3), drawn row-major, then rescaled to spectral radius 0.6.
  draw.U1.resize(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      draw.U1(i, j) = (i == j) ? rng.uniform(0.5, 0.8) : rng.uniform(0.0, 0.3);
  draw.U1 *= 0.6 / spectral_radius(draw.U1);

  draw.M1 = Eigen::MatrixXd::Zero(4, 4);
  draw.M1(0, 0) = 1.0;
  draw.A1 = draw.M1 + draw.U1;
  draw.A2 = -draw.M1 * draw.U1;

  // Impact geometry: three random column scales on (0.8, 1.2), a Haar
  // orthogonal basis, and a mixing rotation that makes the upper 3x3 block
  // of C0 lower triangular with positive diagonal.
  Eigen::VectorXd gtilde(3);
  for (int j = 0; j < 3; ++j) gtilde[j] = rng.uniform(0.8, 1.2);
  const Eigen::MatrixXd gcheck = haar_orthogonal(4, rng);
  draw.G = gcheck.leftCols(3) * gtilde.cwiseSqrt().asDiagonal();

  const Eigen::MatrixXd b = draw.G.topRows(3);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(b.transpose()));
  Eigen::MatrixXd qmat = qr.householderQ();
  const Eigen::MatrixXd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 3; ++j) {
    if (std::abs(rmat(j, j)) <= 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()))
      throw InconsistentDraw("draw_dgp: upper block of G is numerically singular");
    if (rmat(j, j) < 0.0) qmat.col(j) = -qmat.col(j);
  }
  draw.Hmix = qmat;
  draw.C0 = draw.G * draw.Hmix;
  return draw;
}

std::pair<I1FamilySpec, GrangerRep> dgp_to_spec(const DgpDraw& draw) {
  I1FamilySpec spec;
  spec.r = 4;
  spec.q = 3;
  spec.c = 3;
  spec.d = 2;
  spec.xi = Eigen::MatrixXd::Zero(4, 1);
  spec.xi(0, 0) = 1.0;
  spec.eta = draw.C0.row(0).transpose();
  Eigen::MatrixXd j_lower = Eigen::MatrixXd::Identity(4, 4);
  j_lower(0, 0) = 0.0;
  spec.D = j_lower * draw.C0;
  spec.E = PolyMatrix::zero(4, 3);
  spec.S = PolyMatrix({Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd(-draw.U1)});
  spec.gamma_u = Eigen::MatrixXd::Identity(3, 3);
  spec.validate();

  const PolyMatrix direct({Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd(-draw.A1),
                           Eigen::MatrixXd(-draw.A2)});
  if (numerical_rank(eval(direct, 1.0)) != 3)
    throw InconsistentDraw("dgp_to_spec: A(1) does not have rank 3");

  GrangerRep rep = granger_rep(spec);
  if (max_coeff_diff(rep.A, direct) > 1e-10)
    throw InconsistentDraw(
        "dgp_to_spec: error-correction polynomial does not match the generating recursion");
  if ((rep.C0 - draw.C0).cwiseAbs().maxCoeff() > 1e-10)
    throw InconsistentDraw("dgp_to_spec: impact matrix does not match the draw");
  return {std::move(spec), std::move(rep)};
}

SimPath simulate_factors(const GrangerRep& rep, int T, int burn_in, std::uint64_t seed,
                         std::uint64_t stream, const Eigen::MatrixXd& gamma_u) {
  return run_recursion(rep.A, rep.h, rep.C0, gamma_u, T, burn_in, seed, stream);
}

SimPath simulate_factors(const DgpDraw& draw, int T, int burn_in, std::uint64_t seed,
                         std::uint64_t stream) {
  const PolyMatrix a({Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd(-draw.A1),
                      Eigen::MatrixXd(-draw.A2)});
  return run_recursion(a, Eigen::VectorXd::Zero(4), draw.C0, Eigen::MatrixXd(), T, burn_in, seed,
                       stream);
}

void attach_components(SimPath& path, const I1FamilySpec& spec) {
  if (int(path.u_full.cols()) != spec.q)
    throw std::invalid_argument("attach_components: path and family disagree on q");
  const PtDecomp pt = pt_decompose(spec);
  const Eigen::MatrixXd v1_full = path.u_full * pt.eta_perp;
  const Eigen::MatrixXd v2_full = path.u_full * spec.eta;
  Eigen::MatrixXd nu = v2_full;
  for (int t = 1; t < nu.rows(); ++t) nu.row(t) += nu.row(t - 1);
  path.v1 = v1_full.bottomRows(path.T);
  path.v2 = v2_full.bottomRows(path.T);
  path.trend = nu.bottomRows(path.T) * spec.xi.transpose();
}

double max_recursion_residual(const SimPath& path, const PolyMatrix& A, const Eigen::VectorXd& h,
                              const Eigen::MatrixXd& C0) {
  const int total = int(path.F_full.rows());
  const Eigen::VectorXd h_eff = h.size() ? h : Eigen::VectorXd::Zero(A.rows());
  double worst = 0.0;
  for (int t = 0; t < total; ++t) {
    Eigen::VectorXd res = -h_eff - C0 * path.u_full.row(t).transpose();
    for (int i = 0; i <= std::min(A.degree(), t); ++i)
      res += A.coeff(i) * path.F_full.row(t - i).transpose();
    worst = std::max(worst, res.cwiseAbs().maxCoeff());
  }
  return worst;
}

double pt_path_residual(const SimPath& path, const I1FamilySpec& spec) {
  const PtDecomp pt = pt_decompose(spec);
  const PolyMatrix c = build_c_poly(spec);
  const Eigen::MatrixXd v1_full = path.u_full * pt.eta_perp;
  const Eigen::MatrixXd v2_full = path.u_full * spec.eta;
  const int total = int(path.u_full.rows());

  auto lagged = [total](const Eigen::MatrixXd& m, int t) {
    return t >= 0 && t < total ? Eigen::VectorXd(m.row(t).transpose())
                               : Eigen::VectorXd(Eigen::VectorXd::Zero(m.cols()));
  };
  double worst = 0.0;
  for (int t = total - path.T; t < total; ++t) {
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(spec.r);
    for (int k = 0; k <= c.degree(); ++k) direct += c.coeff(k) * lagged(path.u_full, t - k);

    Eigen::VectorXd rebuilt = spec.xi * lagged(v2_full, t);
    for (int k = 0; k <= pt.G1.degree(); ++k)
      rebuilt += pt.G1.coeff(k) * (lagged(v1_full, t - k) - lagged(v1_full, t - k - 1));
    for (int k = 0; k <= pt.G2.degree(); ++k)
      rebuilt += pt.G2.coeff(k) * (lagged(v2_full, t - k) - lagged(v2_full, t - k - 1));
    worst = std::max(worst, (direct - rebuilt).cwiseAbs().maxCoeff());
  }
  return worst;
}

Eigen::MatrixXd simulate_panel(const SimPath& path, const PanelSpec& panel, std::uint64_t seed) {
  panel.validate(int(path.F_full.cols()));
  const int total = path.burn_in + path.T;
  Eigen::MatrixXd x = path.F() * panel.Lambda.transpose();
  for (int j = 0; j < panel.n; ++j) {
    CounterRng rng(seed, kPanelStreamBase + std::uint64_t(j));
    const bool walk = panel.idio_order[size_t(j)] == IdioKind::RandomWalk;
    const double rho = walk ? 1.0 : panel.idio_ar[j];
    double eps = 0.0;
    for (int t = 0; t < total; ++t) {
      eps = rho * eps + panel.idio_scale[j] * rng.gaussian();
      if (t >= path.burn_in) x(t - path.burn_in, j) += eps;
    }
  }
  return x;
}

Eigen::MatrixXd idio_spectral_zero(const PanelSpec& panel) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(panel.n, panel.n);
  for (int j = 0; j < panel.n; ++j)
    if (panel.idio_order[size_t(j)] == IdioKind::RandomWalk)
      sigma(j, j) = panel.idio_scale[j] * panel.idio_scale[j] / (2.0 * std::numbers::pi);
  return sigma;
}

SubvectorPrediction predict_subvector_cointegration(const Eigen::MatrixXd& lambda_p,
                                                    const I1FamilySpec& spec,
                                                    const std::vector<IdioKind>& idio_order) {
  if (lambda_p.cols() != spec.r)
    throw std::invalid_argument("predict_subvector_cointegration: Lambda_p must have r columns");
  if (!idio_order.empty() && int(idio_order.size()) != lambda_p.rows())
    throw std::invalid_argument("predict_subvector_cointegration: one idio flag per row");

  SubvectorPrediction out;
  out.p = int(lambda_p.rows());
  const Eigen::MatrixXd loadings = lambda_p * spec.xi;  // p x (q-d) trend loadings
  out.rank = numerical_rank(loadings);
  out.chi_cointegrated = out.rank < out.p;

  std::ostringstream os;
  os << "rank(Lambda_p xi) = " << out.rank << " with p = " << out.p << ": common component "
     << (out.chi_cointegrated ? "cointegrated" : "not cointegrated");

  if (idio_order.empty()) {
    out.x_cointegrated = out.chi_cointegrated;
    os << "; no idiosyncratic noise declared";
  } else {
    // Any stationary combination must put zero weight on random-walk noise,
    // so only the stationary-noise rows of the trend loadings matter.
    std::vector<int> stationary;
    for (int i = 0; i < out.p; ++i)
      if (idio_order[size_t(i)] == IdioKind::Ar) stationary.push_back(i);
    Eigen::MatrixXd sub(int(stationary.size()), loadings.cols());
    for (size_t i = 0; i < stationary.size(); ++i) sub.row(Eigen::Index(i)) = loadings.row(stationary[i]);
    const int p0 = int(stationary.size());
    out.x_cointegrated = p0 > 0 && numerical_rank(sub) < p0;
    os << "; " << p0 << " of " << out.p << " rows carry stationary noise, their trend loadings"
       << " have rank " << (p0 > 0 ? numerical_rank(sub) : 0) << ": observed subvector "
       << (out.x_cointegrated ? "cointegrated" : "not cointegrated");
  }
  out.reason = os.str();
  return out;
}

}  // namespace singvecm
