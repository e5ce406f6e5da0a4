#pragma once

// Gamma, normalized Bessel j_alpha and Struve H_alpha for real order and
// nonnegative real argument.

#include <array>
#include <cmath>
#include <numbers>

#include "pittlab/error.hpp"

namespace pittlab {

// Series and asymptotic branches meet here for both j_alpha and H_alpha.
inline constexpr double series_crossover = 25.0;

namespace detail {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct dd {
  double hi = 0.0;
  double lo = 0.0;
};

inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline dd quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd operator+(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  const dd t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) {
  const double q1 = a.hi / b.hi;
  dd r = a - b * dd{q1, 0.0};
  const double q2 = r.hi / b.hi;
  r = r - b * dd{q2, 0.0};
  const double q3 = r.hi / b.hi;
  return dd{q1, 0.0} + dd{q2, 0.0} + dd{q3, 0.0};
}

// Alternating power series sum_k t_k with t_0 = 1 and
// t_k = t_{k-1} * w / ((k + s1) (k + s2)), accumulated in double-double so
// that cancellation between terms of size e^x stays below 1e-16 of the sum.
inline double alternating_series(double half_x, double s1, double s2) {
  const dd w = -two_prod(half_x, half_x);
  dd term{1.0, 0.0};
  dd sum{1.0, 0.0};
  for (int k = 1; k < 400; ++k) {
    const dd a = two_sum(static_cast<double>(k), s1);
    const dd b = two_sum(static_cast<double>(k), s2);
    term = term * w / (a * b);
    sum = sum + term;
    if (std::abs(term.hi) < 1e-18 * std::abs(sum.hi) && 2 * k > half_x) break;
  }
  return sum.hi + sum.lo;
}

// Hankel-type asymptotic factors P, Q for order nu (8 terms total).
struct hankel_pq {
  double p;
  double q;
};

inline hankel_pq hankel_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double a = 1.0;
  double p = 1.0;
  double q = 0.0;
  double xk = 1.0;
  for (int k = 1; k < 8; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (8.0 * k);
    xk *= x;
    const double t = a / xk;
    // signs: P = a0 - a2/x^2 + a4/x^4 ..., Q = a1/x - a3/x^3 + ...
    const int m = k % 4;
    if (m == 1) q += t;
    else if (m == 2) p -= t;
    else if (m == 3) q -= t;
    else p += t;
  }
  return {p, q};
}

}  // namespace detail

// Lanczos approximation, g = 7 with 9 coefficients.
inline double gamma_fn(double z) {
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double pi = std::numbers::pi;
  if (z < 0.5) return pi / (std::sin(pi * z) * gamma_fn(1.0 - z));
  z -= 1.0;
  double acc = c[0];
  for (int i = 1; i < 9; ++i) acc += c[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

// J_nu and Y_nu from the large-argument expansion; accurate for x >= 20 and
// moderate order.
inline double bessel_J_asymptotic(double nu, double x) {
  constexpr double pi = std::numbers::pi;
  const auto [p, q] = detail::hankel_asymptotic(nu, x);
  const double chi = x - (0.5 * nu + 0.25) * pi;
  return std::sqrt(2.0 / (pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

inline double bessel_Y_asymptotic(double nu, double x) {
  constexpr double pi = std::numbers::pi;
  const auto [p, q] = detail::hankel_asymptotic(nu, x);
  const double chi = x - (0.5 * nu + 0.25) * pi;
  return std::sqrt(2.0 / (pi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

inline double bessel_j_series(double alpha, double x) {
  return detail::alternating_series(0.5 * x, 0.0, alpha);
}

inline double bessel_j_asymptotic(double alpha, double x) {
  return gamma_fn(alpha + 1.0) * std::pow(2.0 / x, alpha) * bessel_J_asymptotic(alpha, x);
}

// Normalized Bessel function j_alpha(x) = Gamma(alpha+1) (x/2)^{-alpha} J_alpha(x).
inline double bessel_j(double alpha, double x) {
  if (!(alpha > -1.0)) throw lab_error(errc::domain, "bessel_j requires alpha > -1");
  if (!(x >= 0.0)) throw lab_error(errc::domain, "bessel_j requires x >= 0");
  if (x == 0.0) return 1.0;
  return x <= series_crossover ? bessel_j_series(alpha, x) : bessel_j_asymptotic(alpha, x);
}

inline double struve_h_series(double alpha, double x) {
  if (x == 0.0) return 0.0;
  const double lead = 1.0 / (gamma_fn(1.5) * gamma_fn(alpha + 1.5));
  return lead * std::pow(0.5 * x, alpha + 1.0) * detail::alternating_series(0.5 * x, 0.5, alpha + 0.5);
}

// H_alpha = Y_alpha + (1/pi) sum_k Gamma(k+1/2) (x/2)^{alpha-2k-1} / Gamma(alpha+1/2-k),
// the sum truncated at its smallest term.
inline double struve_h_asymptotic(double alpha, double x) {
  const double inv_half_sq = 4.0 / (x * x);
  double term = std::pow(0.5 * x, alpha - 1.0) / (std::sqrt(std::numbers::pi) * gamma_fn(alpha + 0.5));
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (k - 0.5) * (alpha + 0.5 - k) * inv_half_sq;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return bessel_Y_asymptotic(alpha, x) + sum;
}

inline double struve_h(double alpha, double x) {
  if (!(alpha > -0.5)) throw lab_error(errc::domain, "struve_h requires alpha > -1/2");
  if (!(x >= 0.0)) throw lab_error(errc::domain, "struve_h requires x >= 0");
  return x <= series_crossover ? struve_h_series(alpha, x) : struve_h_asymptotic(alpha, x);
}

}  // namespace pittlab
