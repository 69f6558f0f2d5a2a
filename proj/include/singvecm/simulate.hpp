#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "singvecm/model.hpp"

namespace singvecm {

// RNG stream allocation used by this module (all streams share one seed):
//   stream 0           parameter draws (draw_dgp)
//   stream 1 + i       factor path of replication i (default path stream 1)
//   stream 2^24 + j    idiosyncratic series j of a panel
inline constexpr std::uint64_t kPanelStreamBase = std::uint64_t(1) << 24;

// Monte Carlo data-generating process: four series driven by three shocks,
//   F_t = A1 F_{t-1} + A2 F_{t-2} + C0 u_t,   u_t ~ N(0, I_3),
// with A(L) = I - A1 L - A2 L^2 = (I - M1 L)(I - U1 L). M1 = diag(1,0,0,0)
// carries the single unit root (one common trend, cointegration rank 3).
struct DgpDraw {
  Eigen::MatrixXd U1;    // 4x4 stable factor, spectral radius exactly 0.6
  Eigen::MatrixXd M1;    // diag(1,0,0,0)
  Eigen::MatrixXd A1;    // M1 + U1
  Eigen::MatrixXd A2;    // -M1 U1
  Eigen::MatrixXd G;     // 4x3, random orthogonal columns times random scales
  Eigen::MatrixXd Hmix;  // 3x3 orthogonal mixing matrix
  Eigen::MatrixXd C0;    // G * Hmix: upper 3x3 lower triangular, diagonal > 0
  std::uint64_t seed = 0;
};

// A simulated factor path. The recursion runs from zero initial conditions
// over burn_in + T periods; the first burn_in rows are kept so that lagged
// identities can be verified exactly on the retained sample.
struct SimPath {
  int T = 0;
  int burn_in = 0;
  Eigen::VectorXd W;       // level offset, zero under the W = 0 convention
  Eigen::MatrixXd F_full;  // (burn_in + T) x r
  Eigen::MatrixXd u_full;  // (burn_in + T) x q

  // Filled by attach_components (retained sample only).
  Eigen::MatrixXd v1;     // T x d transitory shocks, eta_perp' u
  Eigen::MatrixXd v2;     // T x (q-d) permanent shocks, eta' u
  Eigen::MatrixXd trend;  // T x r common trend, xi * cumulated v2

  Eigen::Block<const Eigen::MatrixXd> F() const { return F_full.bottomRows(T); }
  Eigen::Block<const Eigen::MatrixXd> u() const { return u_full.bottomRows(T); }
};

enum class IdioKind { Ar, RandomWalk };

// Observable panel x_t = Lambda F_t + eps_t with per-series idiosyncratic
// noise: a stationary AR(1) (IdioKind::Ar, coefficient idio_ar) or a random
// walk (IdioKind::RandomWalk); idio_scale is the innovation standard
// deviation in both cases.
struct PanelSpec {
  int n = 0;
  Eigen::MatrixXd Lambda;            // n x r
  std::vector<IdioKind> idio_order;  // n flags
  Eigen::VectorXd idio_ar;           // n coefficients (used for Ar series)
  Eigen::VectorXd idio_scale;        // n innovation scales, >= 0

  void validate(int r) const;  // throws std::invalid_argument
};

// Verdict on a p-dimensional subvector chi(p) = Lambda_p F (and on the
// observed x(p) = chi(p) + eps(p) when idiosyncratic flags are supplied).
struct SubvectorPrediction {
  int p = 0;
  int rank = 0;  // rank of Lambda_p * xi
  bool chi_cointegrated = false;
  bool x_cointegrated = false;
  std::string reason;
};

// Draw U1, G, Hmix deterministically from the seed (stream 0). The same seed
// always returns the bitwise-identical draw.
DgpDraw draw_dgp(std::uint64_t seed);

// Exact reduced-form coordinates of the draw, plus its error-correction
// representation. The returned representation's polynomial equals
// I - A1 L - A2 L^2 (cross-checked internally) and its impact matrix is C0.
// Throws InconsistentDraw when A(1) does not have rank 3 or the cross-check
// fails.
std::pair<I1FamilySpec, GrangerRep> dgp_to_spec(const DgpDraw& draw);

// Run A(L) F_t = h + C0 u_t forward from zero initial conditions with
// u_t = chol(gamma_u) w_t, w standard normal (gamma_u empty = identity,
// exactly zero = silence the shocks). Throws ExplosiveSystem when det A has
// a root strictly inside the unit circle or the path overflows.
SimPath simulate_factors(const GrangerRep& rep, int T, int burn_in, std::uint64_t seed,
                         std::uint64_t stream = 1,
                         const Eigen::MatrixXd& gamma_u = Eigen::MatrixXd());
SimPath simulate_factors(const DgpDraw& draw, int T, int burn_in, std::uint64_t seed,
                         std::uint64_t stream = 1);

// Fill path.v1, path.v2, path.trend from the shocks and the family's
// permanent/transitory geometry.
void attach_components(SimPath& path, const I1FamilySpec& spec);

// max_t |sum_i A_i F_{t-i} - h - C0 u_t| over the whole recursion (presample
// values are exact zeros, so every t counts).
double max_recursion_residual(const SimPath& path, const PolyMatrix& A, const Eigen::VectorXd& h,
                              const Eigen::MatrixXd& C0);

// Largest gap between C(L) u_t and the permanent/transitory rebuild
// (1-L) G1(L) v1_t + xi v2_t + (1-L) G2(L) v2_t over the retained sample.
double pt_path_residual(const SimPath& path, const I1FamilySpec& spec);

// x = path.F() * Lambda' + eps, idiosyncratic series j simulated on stream
// kPanelStreamBase + j over burn_in + T periods from zero initial conditions.
Eigen::MatrixXd simulate_panel(const SimPath& path, const PanelSpec& panel, std::uint64_t seed);

// Zero-frequency spectral density of the differenced idiosyncratic vector:
// diagonal, scale^2 / (2 pi) for random-walk series and 0 for stationary AR
// series (differencing kills their zero-frequency mass).
Eigen::MatrixXd idio_spectral_zero(const PanelSpec& panel);

// A p-dimensional subvector of the common component is cointegrated iff
// rank(Lambda_p xi) < p, where xi (r x (q-d)) loads the common trends. With
// idiosyncratic flags the observed subvector is cointegrated iff the rows of
// Lambda_p xi at stationary-noise coordinates are rank deficient (weight on
// any random-walk coordinate cannot be annihilated).
SubvectorPrediction predict_subvector_cointegration(
    const Eigen::MatrixXd& lambda_p, const I1FamilySpec& spec,
    const std::vector<IdioKind>& idio_order = {});

}  // namespace singvecm
