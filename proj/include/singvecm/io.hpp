#pragma once

#include <Eigen/Dense>
#include <string>

#include "singvecm/model.hpp"
#include "singvecm/montecarlo.hpp"
#include "singvecm/simulate.hpp"

namespace singvecm {

// Shortest exact decimal representation round-tripping to the same double.
std::string format_double(double x);

// Structured documents (JSON). Matrices are nested arrays [row][col]; matrix
// polynomials are arrays of matrices [coeff][row][col], lag-zero coefficient
// first. Parsers reject unknown keys (listing the valid ones), missing keys,
// and ragged or misshapen arrays, all as ConfigError tagged with `origin`.

// Keys: r, q, c, xi, eta, D, E, S, gamma_u. An empty array is accepted for E
// (meaning identically zero). Serialization is deterministic and stable under
// a parse/serialize round trip.
std::string spec_to_json(const I1FamilySpec& spec);
I1FamilySpec spec_from_json_text(const std::string& text, const std::string& origin);

// Keys: A, A_star, alpha, beta, h, C0.
std::string granger_to_json(const GrangerRep& rep);

// Keys: G1, G2, xi.
std::string pt_to_json(const PtDecomp& pt);

// CSV artifacts. Headers:
//   path:  t,F1..Fr,u1..uq       (retained sample, t from 0)
//   panel: t,x1..xn
//   irf:   lag,response_i_shock_j (level responses, row-major over (i, j))
//   mc:    T,lag,estimator,rmse,n_reps,n_failures
std::string path_csv(const SimPath& path);
std::string panel_csv(const Eigen::MatrixXd& x);
std::string irf_csv(const IrfSet& irf);
std::string mc_csv(const McTable& table);

// Markdown rendition of the experiment: one table per sample length, a row
// per estimator, a column per reported lag. Deterministic (no timestamps).
std::string mc_markdown(const McTable& table);

// Whole-file text helpers; throw ConfigError with the path on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace singvecm
