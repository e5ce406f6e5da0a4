#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "pittlab/special.hpp"

using namespace pittlab;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

// Independent series for j_alpha in long double with Kahan summation.
double j_series_oracle(double alpha, double x) {
  long double sum = 0.0L, comp = 0.0L;
  long double term = 1.0L;
  const long double q = -(static_cast<long double>(x) * x) / 4.0L;
  for (int m = 0; m < 200; ++m) {
    if (m > 0) term *= q / (m * (alpha + m));
    const long double yv = term - comp;
    const long double t = sum + yv;
    comp = (t - sum) - yv;
    sum = t;
  }
  return static_cast<double>(sum);
}

// H_{3/2} in closed form.
double struve_three_halves(double x) {
  const double pi = std::numbers::pi;
  return std::sqrt(x / (2.0 * pi)) * (1.0 + 2.0 / (x * x)) - std::sqrt(2.0 / (pi * x)) * (std::sin(x) + std::cos(x) / x);
}

}  // namespace

TEST_CASE("normalized Bessel function at the origin and closed forms", "[special]") {
  CHECK(bessel_j(0.7, 0.0) == 1.0);
  CHECK_THAT(bessel_j(-0.5, 2.0), WithinRel(std::cos(2.0), 1e-13));
  CHECK_THAT(bessel_j(0.5, 3.0), WithinRel(j_series_oracle(0.5, 3.0), 1e-13));
  CHECK_THAT(bessel_j(0.5, 3.0), WithinRel(std::sin(3.0) / 3.0, 1e-13));
}

TEST_CASE("normalized Bessel function matches the series oracle across the crossover", "[special]") {
  for (double alpha : {-0.25, 0.0, 1.0, 2.5})
    for (double x : {0.1, 1.0, 5.0, 12.0, 20.0}) CHECK_THAT(bessel_j(alpha, x), WithinAbs(j_series_oracle(alpha, x), 1e-11));
  // Large argument: compare against the half-integer closed form.
  for (double x : {30.0, 80.0, 500.0}) CHECK_THAT(bessel_j(0.5, x), WithinAbs(std::sin(x) / x, 1e-13));
}

TEST_CASE("Struve function closed forms", "[special]") {
  const double pi = std::numbers::pi;
  CHECK_THAT(struve_h(0.5, 1.0), WithinRel(std::sqrt(2.0 / pi) * (1.0 - std::cos(1.0)), 1e-12));
  for (double x : {0.3, 2.0, 6.0, 24.0, 26.0, 60.0, 200.0}) CHECK_THAT(struve_h(1.5, x), WithinRel(struve_three_halves(x), 1e-10));
}

TEST_CASE("Struve function small-argument limit", "[special]") {
  const double a = 0.8;
  const double limit = std::pow(0.5, a + 1.0) / (std::tgamma(1.5) * std::tgamma(a + 1.5));
  CHECK_THAT(struve_h(a, 1e-6) / std::pow(1e-6, a + 1.0), WithinRel(limit, 1e-9));
}

TEST_CASE("Struve function large-argument expansion", "[special]") {
  const double a = 1.5, x = 200.0;
  const double pi = std::numbers::pi;
  const double y32 = -std::sqrt(2.0 / (pi * x)) * (std::cos(x) / x + std::sin(x));
  const double expansion = std::pow(x / 2.0, a - 1.0) / (std::tgamma(a + 0.5) * std::tgamma(0.5)) + y32;
  CHECK_THAT(struve_h(a, x), WithinRel(expansion, 1e-4));
}

TEST_CASE("gamma function", "[special]") {
  for (double z : {0.5, 1.0, 1.5, 3.25, 7.0}) CHECK_THAT(gamma_fn(z), WithinRel(std::tgamma(z), 1e-13));
}
