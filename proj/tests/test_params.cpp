#include <cmath>

#include "doctest.h"
#include "lfpp/errors.hpp"
#include "lfpp/params.hpp"

using namespace lfpp;

TEST_CASE("delta root for m=1 equals sqrt(2)-1") {
  // d*(2+d) = 1 is d^2 + 2d - 1 = 0, positive root sqrt(2) - 1.
  CHECK(solve_delta(1) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("delta root satisfies its defining equation") {
  for (int m = 1; m <= 8; ++m) {
    const double d = solve_delta(m);
    CHECK(std::abs(d * std::pow(2.0 + d, m) - 1.0) < 1e-13);
    // Crude bracket: (2+d)^m > 2^m forces d < 2^-m; the ratio stays above 0.8.
    CHECK(d < std::ldexp(1.0, -m));
    CHECK(d > 0.8 * std::ldexp(1.0, -m));
  }
}

TEST_CASE("frozen delta values") {
  CHECK(solve_delta(2) == doctest::Approx(0.2055694304).epsilon(1e-9));
  CHECK(solve_delta(6) == doctest::Approx(0.0149425260826).epsilon(1e-9));
}

TEST_CASE("delta is decreasing in m") {
  double prev = solve_delta(1);
  for (int m = 2; m <= 8; ++m) {
    const double d = solve_delta(m);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("scale lengths satisfy the three-piece identity") {
  const auto p = make_scale_params(2, 2);
  for (int l = -5; l <= 10; ++l) {
    const double al = scale_length(p, l);
    const double sum = 2.0 * scale_length(p, l - 1) + scale_length(p, l - p.m - 1);
    CHECK(al == doctest::Approx(sum).epsilon(1e-12));
  }
  // delta * a_m = 1 restates the defining equation.
  CHECK(p.delta * scale_length(p, p.m) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("derived parameters at the standard desk scale") {
  const auto p = make_scale_params(2, 2);
  CHECK(p.Gamma == doctest::Approx(std::pow(p.base(), 2)).epsilon(1e-15));
  CHECK(p.Gamma > 4.86);
  CHECK(p.Gamma < 4.87);
  CHECK(p.alpha == doctest::Approx(std::pow(p.delta, -0.25)).epsilon(1e-15));
  CHECK(p.alpha > 1.48);
  CHECK(p.alpha < 1.49);
}

TEST_CASE("exponent window check") {
  CHECK_FALSE(paper_regime_ok(make_scale_params(2, 2, 0.0)));
  CHECK(paper_regime_ok(make_scale_params(2, 2, 0.6)));
  CHECK_FALSE(paper_regime_ok(make_scale_params(2, 2, 0.5)));
  CHECK_FALSE(paper_regime_ok(make_scale_params(2, 2, 0.9)));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(solve_delta(0), usage_error);
  CHECK_THROWS_AS(solve_delta(-3), usage_error);
  CHECK_THROWS_AS(make_scale_params(2, -1), usage_error);
  CHECK_THROWS_AS(make_scale_params(2, 2, -0.5), usage_error);
  const auto p = make_scale_params(2, 2);
  CHECK_THROWS_AS(scale_length(p, 100000), numerical_error);
}
