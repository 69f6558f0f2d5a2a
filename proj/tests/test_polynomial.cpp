#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "singvecm/errors.hpp"
#include "singvecm/polynomial.hpp"

using namespace singvecm;

namespace {

double min_root_distance_to(const std::vector<std::complex<double>>& roots, double target_re) {
  double best = 1e300;
  for (const auto& z : roots) best = std::min(best, std::abs(z - std::complex<double>(target_re, 0)));
  return best;
}

}  // namespace

TEST_CASE("construction trims trailing zeros") {
  Polynomial p({1.0, 2.0, 0.0, 0.0});
  CHECK(p.degree() == 1);
  CHECK(p.leading() == 2.0);
  Polynomial z({0.0, 0.0});
  CHECK(z.is_zero());
  CHECK(z.degree() == 0);
}

TEST_CASE("evaluation and arithmetic") {
  Polynomial p({1.0, -2.0, 1.0});  // (1-z)^2
  CHECK(p.eval(1.0) == doctest::Approx(0.0));
  CHECK(p.eval(3.0) == doctest::Approx(4.0));
  Polynomial q = multiply(Polynomial({1.0, -1.0}), Polynomial({1.0, -1.0}));
  CHECK(q.coeffs() == std::vector<double>{1.0, -2.0, 1.0});
  Polynomial s = add(Polynomial({1.0, -1.0}), Polynomial({0.0, 1.0}));
  CHECK(s.degree() == 0);
  CHECK(s[0] == 1.0);
}

TEST_CASE("roots: linear, double, factored") {
  auto r1 = poly_roots(Polynomial({1.0, -1.0}));  // 1 - z
  REQUIRE(r1.size() == 1);
  CHECK(std::abs(r1[0] - std::complex<double>(1.0, 0.0)) < 1e-12);

  auto r2 = poly_roots(Polynomial({1.0, -2.0, 1.0}));  // (1 - z)^2
  REQUIRE(r2.size() == 2);
  CHECK(min_root_distance_to(r2, 1.0) < 1e-6);

  // (1 - 0.6 z)(1 - 0.3 z) = 1 - 0.9 z + 0.18 z^2
  auto r3 = poly_roots(Polynomial({1.0, -0.9, 0.18}));
  REQUIRE(r3.size() == 2);
  CHECK(min_root_distance_to(r3, 1.0 / 0.6) < 1e-10);
  CHECK(min_root_distance_to(r3, 1.0 / 0.3) < 1e-10);
}

TEST_CASE("roots: zero roots factored out, constants rejected or empty") {
  auto r = poly_roots(Polynomial({0.0, 0.0, 1.0}));  // z^2
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0]) == 0.0);
  CHECK(std::abs(r[1]) == 0.0);
  CHECK(poly_roots(Polynomial({5.0})).empty());
  CHECK_THROWS_AS(poly_roots(Polynomial()), std::invalid_argument);
}

TEST_CASE("from_roots round trip") {
  const std::vector<double> roots{-2.0, 0.5, 3.0};
  Polynomial p = Polynomial::from_roots(roots, 2.0);
  CHECK(p.degree() == 3);
  CHECK(p.leading() == doctest::Approx(2.0));
  for (double r : roots) CHECK(std::abs(p.eval(r)) < 1e-12);
}

TEST_CASE("resultant: shared root detection") {
  // a = z - 1 twice: shared root.
  CHECK(resultant(Polynomial({-1.0, 1.0}), Polynomial({-1.0, 1.0})) == doctest::Approx(0.0));
  // a = z - 2, b = z - 3: product formula gives (2 - 3) = -1.
  CHECK(resultant(Polynomial({-2.0, 1.0}), Polynomial({-3.0, 1.0})) == doctest::Approx(-1.0));
  // a = z^2 - 1, b = z - 1 share the root 1.
  CHECK(resultant(Polynomial({-1.0, 0.0, 1.0}), Polynomial({-1.0, 1.0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("resultant: constants and degenerate input") {
  CHECK(resultant(Polynomial({2.0}), Polynomial({-1.0, 0.0, 1.0})) == doctest::Approx(4.0));
  CHECK(resultant(Polynomial({3.0}), Polynomial({2.0})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(resultant(Polynomial(), Polynomial({1.0, 1.0})), DegenerateResultant);
}

TEST_CASE("resultant matches the root-product formula on composed factors") {
  const std::vector<double> ra{-1.5, 0.5, 2.0};
  const std::vector<double> rb{1.0, -0.5};
  Polynomial a = Polynomial::from_roots(ra, 1.0);
  Polynomial b = Polynomial::from_roots(rb, 1.0);
  double expect = 1.0;
  for (double x : ra)
    for (double y : rb) expect *= (x - y);
  CHECK(resultant(a, b) == doctest::Approx(expect).epsilon(1e-10));
}
