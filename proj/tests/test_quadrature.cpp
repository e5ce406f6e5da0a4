#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "pittlab/quadrature.hpp"

using namespace pittlab;
using Catch::Matchers::WithinRel;

TEST_CASE("polynomial on a finite interval", "[quadrature]") {
  const auto r = integrate([](double x) { return x; }, 0.0, 1.0, QuadratureConfig{});
  CHECK(r.converged());
  CHECK_THAT(r.value, WithinRel(0.5, 1e-14));
}

TEST_CASE("oscillatory integrand against its antiderivative", "[quadrature]") {
  const double r = 3.0, y = 2.0;
  const auto q = integrate([y](double x) { return std::sin(x * y); }, 0.0, r, QuadratureConfig{}, 2.0 * std::numbers::pi / y);
  CHECK_THAT(q.value, WithinRel((1.0 - std::cos(r * y)) / y, 1e-10));
  // Many periods.
  const double Y = 400.0;
  const auto w = integrate([Y](double x) { return std::sin(x * Y); }, 0.0, 10.0, QuadratureConfig{}, 2.0 * std::numbers::pi / Y);
  CHECK_THAT(w.value, WithinRel((1.0 - std::cos(10.0 * Y)) / Y, 1e-8));
}

TEST_CASE("improper integral of a piecewise power", "[quadrature]") {
  const std::vector<double> breaks{1.0};
  const auto r = integrate_improper([](double x) { return std::min(1.0, 1.0 / (x * x)); }, 0.0,
                                    std::numeric_limits<double>::infinity(), QuadratureConfig{}, breaks);
  CHECK_FALSE(r.divergent());
  CHECK_THAT(r.value, WithinRel(2.0, 1e-7));
}

TEST_CASE("logarithmic divergence is reported", "[quadrature]") {
  const auto at_zero = integrate_improper([](double x) { return 1.0 / x; }, 0.0, 1.0, QuadratureConfig{});
  CHECK(at_zero.divergent());
  CHECK(at_zero.site == DivergenceSite::at_zero);
  const auto at_inf = integrate_improper([](double x) { return 1.0 / x; }, 1.0, std::numeric_limits<double>::infinity(),
                                         QuadratureConfig{});
  CHECK(at_inf.divergent());
  CHECK(at_inf.site == DivergenceSite::at_infinity);
}

TEST_CASE("tail truncation point from a decay bound", "[quadrature]") {
  CHECK_THAT(tail_truncation_point(PowerDecay{1.0, -2.0}, 1e-10), WithinRel(1e10, 1e-12));
  CHECK_THAT(tail_truncation_point(PowerDecay{3.0, -3.0}, 1.5e-6), WithinRel(1000.0, 1e-12));
  CHECK_THROWS_AS(tail_truncation_point(PowerDecay{1.0, -1.0}, 1e-10), lab_error);
}

TEST_CASE("integral to infinity with a tail bound and with a fixed cutoff", "[quadrature]") {
  auto f = [](double x) { return 1.0 / (x * x); };
  const auto tb = integrate_to_infinity(f, 1.0, QuadratureConfig{}, PowerDecay{1.0, -2.0});
  CHECK_THAT(tb.value, WithinRel(1.0, 1e-8));
  CHECK_THROWS_AS(integrate_to_infinity(f, 1.0, QuadratureConfig{}), lab_error);
  QuadratureConfig fixed;
  fixed.truncation = FixedCutoff{100.0};
  // Oscillatory tail: int_1^inf sin(x)/x^2.
  auto g = [](double x) { return std::sin(x) / (x * x); };
  const auto fc = integrate_to_infinity(g, 1.0, fixed, std::nullopt, 2.0 * std::numbers::pi);
  const auto ref = integrate_to_infinity(g, 1.0, QuadratureConfig{}, PowerDecay{1.0, -2.0}, 2.0 * std::numbers::pi);
  CHECK_THAT(fc.value, WithinRel(ref.value, 1e-5));
}

TEST_CASE("weighted Lp norms", "[quadrature]") {
  auto one = [](double x) { return x > 0.0 && x < 1.0 ? 1.0 : 0.0; };
  auto unit = [](double) { return 1.0; };
  const auto a = weighted_lp_norm(one, NormSpec<decltype(unit)>{2.0, unit, 0.0, 1.0}, QuadratureConfig{});
  CHECK_THAT(a.value, WithinRel(1.0, 1e-12));

  const double gamma = 0.3, p = 2.0, r = 2.0;
  auto f = [](double x) { return std::sqrt(x); };
  auto v = [&](double x) { return std::pow(x, gamma * p); };
  const auto b = weighted_lp_norm(f, NormSpec<decltype(v)>{p, v, 0.0, r}, QuadratureConfig{});
  const double e = p * (gamma + 0.5);
  CHECK_THAT(b.value, WithinRel(std::sqrt(std::pow(r, e + 1.0) / (e + 1.0)), 1e-10));
}

TEST_CASE("configuration validation", "[quadrature]") {
  QuadratureConfig c;
  c.rel_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), lab_error);
}
