#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "pittlab/weights.hpp"

using namespace pittlab;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("weights evaluate as powers", "[weights]") {
  const Weight w = Weight::power(1.5);
  CHECK_THAT(w(4.0), WithinRel(8.0, 1e-15));
  const Weight pw = Weight::piecewise(2.0, -1.0);
  CHECK_THAT(pw(0.5), WithinRel(0.25, 1e-15));
  CHECK_THAT(pw(4.0), WithinRel(0.25, 1e-15));
  CHECK(pw.exponent_at_zero() == 2.0);
  CHECK(pw.exponent_at_infinity() == -1.0);
}

TEST_CASE("exponent set validation and duals", "[weights]") {
  ExponentSet e{2.0, 3.0, 1.0};
  CHECK_NOTHROW(e.validate());
  CHECK(e.p_dual() == 2.0);
  CHECK(e.inv_a_dual() == 0.0);
  CHECK_THROWS_AS((ExponentSet{3.0, 2.0, 1.0}.validate()), lab_error);
  CHECK_THROWS_AS((ExponentSet{1.0, 2.0, 1.0}.validate()), lab_error);
}

TEST_CASE("truncated powers", "[weights]") {
  const auto ind = make_truncated_power(0.0, 1.0, Side::below);
  CHECK(ind(0.5) == 1.0);
  CHECK(ind(1.5) == 0.0);
  const auto tail = make_truncated_power(-2.0, 1.0, Side::above);
  CHECK_THAT(tail(2.0), WithinRel(0.25, 1e-15));
  CHECK(tail(0.5) == 0.0);
  CHECK(std::isinf(tail.support_hi()));
}

TEST_CASE("log counterexample has vanishing mean and closed-form norm", "[weights]") {
  QuadratureConfig tight{1e-12, 1e-300};
  CHECK_THAT(moment(make_log_counterexample(10, 0.0), 0.0, tight), WithinAbs(0.0, 1e-10));
  for (int N : {2, 1000}) {
    const double p = 2.0, b = 0.0;
    const auto f = make_log_counterexample(N, b);
    auto v = [&](double x) { return std::pow(x, p * (1.0 / 2.0 + b)); };
    auto g = [&](double x) { return f(x); };
    const auto n = weighted_lp_norm(g, NormSpec<decltype(v)>{p, v, f.support_lo(), f.support_hi()}, tight,
                                    std::span<const double>(f.breakpoints()));
    CHECK_THAT(n.value, WithinRel(std::sqrt(2.0 * std::log(static_cast<double>(N))), 1e-9));
  }
}

TEST_CASE("vanishing-moment construction", "[weights]") {
  QuadratureConfig tight{1e-13, 1e-300};
  // One killed moment on the f_N nodes reproduces f_N up to scale.
  const int N = 10;
  const std::vector<double> one{0.0};
  const std::vector<double> nodes{0.1, 1.0, 10.0};
  const auto f = make_vanishing_moment_function(one, nodes, -1.0);
  const auto fn = make_log_counterexample(N, 0.0);
  const double scale = f(0.5) / fn(0.5);
  for (double x : {0.2, 0.9, 3.0, 9.0}) CHECK_THAT(f(x), WithinRel(scale * fn(x), 1e-12));

  const double alpha = 0.5;
  const std::vector<double> two{2 * alpha + 1, 2 * alpha + 3};
  const std::vector<double> four_nodes{0.5, 1.0, 1.5, 2.5};
  const auto g = make_vanishing_moment_function(two, four_nodes, 0.0);
  for (double m : two) CHECK(std::abs(moment(g, m, tight)) <= 1e-12);

  const auto h = make_vanishing_moment_function({}, nodes, 0.0);
  CHECK(h(0.5) == 1.0);
  CHECK(h(5.0) == 0.0);
}

TEST_CASE("GM witnesses", "[weights]") {
  const auto inv = make_custom_function([](double x) { return 1.0 / x; }, 0.0, std::numeric_limits<double>::infinity());
  CHECK(check_gm(inv).witness.has_value());
  CHECK(check_gm(make_truncated_power(0.5, 1.0, Side::below)).witness.has_value());
  const auto sine = make_custom_function([](double x) { return std::sin(x); }, 0.0, 100.0);
  GMCheckConfig to_100;
  to_100.hi = 100.0;
  CHECK_FALSE(check_gm(sine, to_100).witness.has_value());
}

TEST_CASE("variation of sin on [x, 2x] outgrows its local average", "[weights]") {
  // At x = 50 the variation is about 2x/pi times 2 while the lambda = 2 average is bounded.
  const double x = 50.0;
  double var = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double a = x + x * k / n, b = x + x * (k + 1) / n;
    var += std::abs(std::sin(b) - std::sin(a));
  }
  QuadratureConfig c;
  const double avg = integrate([](double t) { return std::abs(std::sin(t)); }, x / 2.0, 2.0 * x, c, 2.0 * std::acos(-1.0)).value;
  CHECK(x * var / avg > 20.0);
}
