#pragma once

// Power-type transforms Ff(y) = y^c0 int_0^inf x^b0 f(x) K(x, y) dx, their
// pointwise bounds, and the moment-reduced evaluation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pittlab/error.hpp"
#include "pittlab/kernels.hpp"
#include "pittlab/quadrature.hpp"
#include "pittlab/weights.hpp"

namespace pittlab {

enum class TransformName { Hankel, ScriptH, Sine, Cosine, ModelMin, Generic };

inline const char* to_string(TransformName n) {
  switch (n) {
    case TransformName::Hankel: return "hankel";
    case TransformName::ScriptH: return "scripth";
    case TransformName::Sine: return "sine";
    case TransformName::Cosine: return "cosine";
    case TransformName::ModelMin: return "modelmin";
    case TransformName::Generic: return "generic";
  }
  return "generic";
}

struct TransformSpec {
  double b0 = 0.0;
  double c0 = 0.0;
  KernelSpec kernel;
  TransformName name = TransformName::Generic;
  double param = 0.0;  // alpha for Hankel/ScriptH, delta for ModelMin
  std::optional<PrimitiveBound> primitive;  // G with dG/dx = x^b0 K, for GM bounds

  const PowerEnvelope& envelope() const { return kernel.envelope(); }
  std::string label() const {
    std::string s = to_string(name);
    if (name == TransformName::Hankel || name == TransformName::ScriptH || name == TransformName::ModelMin)
      s += "(" + std::to_string(param) + ")";
    return s;
  }
};

inline TransformSpec hankel_transform(double alpha) {
  return {2.0 * alpha + 1.0, 0.0, bessel_kernel(alpha), TransformName::Hankel, alpha,
          PrimitiveBound{alpha + 0.5, -alpha - 1.5, 2.0 * alpha + 1.0, 1.0}};
}

inline TransformSpec script_h_transform(double alpha) {
  return {0.5, 0.5, struve_kernel(alpha), TransformName::ScriptH, alpha,
          PrimitiveBound{alpha + 0.5, alpha - 1.0, 0.5, 1.0}};
}

inline TransformSpec sine_transform() {
  return {0.0, 0.0, sine_kernel(), TransformName::Sine, 0.0, PrimitiveBound{0.0, -1.0, 0.0, 1.0}};
}

inline TransformSpec cosine_transform() {
  return {0.0, 0.0, cosine_kernel(), TransformName::Cosine, 0.0, PrimitiveBound{0.0, -1.0, 0.0, 1.0}};
}

// Fourier-type form with s = w = x^delta folded in as b0 = delta, c0 = 0.
inline TransformSpec model_min_transform(double delta) {
  return {delta, 0.0, model_min_kernel(delta), TransformName::ModelMin, delta, std::nullopt};
}

inline TransformSpec generic_transform(double b0, double c0, KernelSpec kernel,
                                       std::optional<PrimitiveBound> primitive = std::nullopt) {
  return {b0, c0, std::move(kernel), TransformName::Generic, 0.0, primitive};
}

struct TransformResult {
  std::vector<double> y_grid;
  std::vector<double> values;
  std::vector<double> error_estimates;
  std::vector<QuadStatus> statuses;
  std::vector<std::string> truncation_report;

  bool all_converged() const {
    for (auto s : statuses)
      if (s != QuadStatus::converged) return false;
    return true;
  }
};

enum class AdmissibilityMode { Pointwise, GM };

struct AdmissibilityReport {
  bool admissible = false;
  double near_zero = 0.0;  // int_0^1 part
  double near_infinity = 0.0;  // int_1^inf part
};

namespace detail {

// int_lo^hi x^e |f(x)| with improper ends handled by decade extension.
inline QuadResult abs_power_integral(const TestFunction& f, double e, double lo, double hi,
                                     const QuadratureConfig& cfg) {
  lo = std::max(lo, f.support_lo());
  hi = std::min(hi, f.support_hi());
  if (!(hi > lo)) return {};
  auto g = [&](double x) { return std::pow(x, e) * std::abs(f(x)); };
  QuadratureConfig c = cfg;
  c.abs_tol = 1e-300;
  return integrate_improper(g, lo, hi, c, std::span<const double>(f.breakpoints()));
}

}  // namespace detail

// Pointwise: int_0^1 x^{b0+b1}|f| + int_1^inf x^{b0+b2}|f| finite, which for the
// Fourier-type form is int_0^1 s|f| + int_1^inf s^{1/2}|f|.
// GM: int_0^1 x^{b0+b1}|f| + int_1^inf x^{b-1}|f| finite.
inline AdmissibilityReport check_admissible(const TestFunction& f, const TransformSpec& spec, AdmissibilityMode mode,
                                            const QuadratureConfig& cfg = {}) {
  const auto& env = spec.envelope();
  double far = spec.b0 + env.b2;
  if (mode == AdmissibilityMode::GM) {
    if (!spec.primitive) throw lab_error(errc::missing_primitive_bound, spec.label() + " has no primitive bound");
    far = spec.primitive->b - 1.0;
  }
  QuadratureConfig c = cfg;
  c.rel_tol = std::max(cfg.rel_tol, 1e-8);
  const QuadResult a = detail::abs_power_integral(f, spec.b0 + env.b1, 0.0, 1.0, c);
  const QuadResult b = detail::abs_power_integral(f, far, 1.0, std::numeric_limits<double>::infinity(), c);
  AdmissibilityReport r;
  r.near_zero = a.divergent() ? std::numeric_limits<double>::infinity() : a.value;
  r.near_infinity = b.divergent() ? std::numeric_limits<double>::infinity() : b.value;
  r.admissible = std::isfinite(r.near_zero) && std::isfinite(r.near_infinity);
  return r;
}

namespace detail {

struct PointValue {
  QuadResult quad;
  std::string truncation;
};

// y^c0 int x^b0 f(x) k(x) dx for one y, split at the support breakpoints, at
// 1/y and at the special-function crossover; an unbounded support closes with
// the envelope decay x^{sigma + b0 + b2} or cutoff extrapolation.
template <class K>
PointValue transform_point(double b0, double c0, const K& k, double wavelength, double far_exponent,
                           double far_constant, const TestFunction& f, double y, const QuadratureConfig& cfg) {
  PointValue out;
  if (f.is_zero()) {
    out.truncation = "zero";
    return out;
  }
  auto g = [&](double x) { return std::pow(x, b0) * f(x) * k(x); };
  std::vector<double> pts;
  for (double b : f.breakpoints())
    if (std::isfinite(b)) pts.push_back(b);
  const double lo = f.support_lo();
  const double hi = f.support_hi();
  for (double b : {1.0 / y, series_crossover / y})
    if (b > lo && b < hi) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (std::isfinite(hi)) {
    out.quad = integrate(g, std::span<const double>(pts), cfg, wavelength);
    out.truncation = "compact";
  } else {
    const double start = std::max(pts.back(), 1.0 / y);
    if (start > pts.back()) pts.push_back(start);
    out.quad = integrate(g, std::span<const double>(pts), cfg, wavelength);
    const double e = far_exponent;
    if (e < -1.0 && std::holds_alternative<TailBound>(cfg.truncation)) {
      out.quad += integrate_to_infinity(g, start, cfg, PowerDecay{far_constant, e}, wavelength);
      out.truncation = "tail-bound";
    } else {
      QuadratureConfig c = cfg;
      double x = 100.0 * std::max({wavelength, 1.0 / y, start});
      if (const auto* fc = std::get_if<FixedCutoff>(&cfg.truncation)) x = std::max(fc->x, start + wavelength);
      c.truncation = FixedCutoff{x};
      out.quad += integrate_to_infinity(g, start, c, std::nullopt, wavelength);
      out.truncation = "richardson";
    }
  }
  const double yc = std::pow(y, c0);
  out.quad.value *= yc;
  out.quad.error *= yc;
  return out;
}

inline void check_y(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw lab_error(errc::domain, "transform points y must be positive");
}

}  // namespace detail

// Ff on a y grid. Requires pointwise admissibility unless overridden.
inline TransformResult apply(const TransformSpec& spec, const TestFunction& f, std::span<const double> y_grid,
                             const QuadratureConfig& cfg = {}, bool override_admissibility = false) {
  cfg.validate();
  if (!override_admissibility && !f.is_zero() && !check_admissible(f, spec, AdmissibilityMode::Pointwise, cfg).admissible)
    throw lab_error(errc::admissibility, "test function is not admissible for " + spec.label());
  TransformResult r;
  const auto& env = spec.envelope();
  for (double y : y_grid) {
    detail::check_y(y);
    const double e = (f.decay() ? f.decay()->exponent : 0.0) + spec.b0 + env.b2;
    const double C = (f.decay() ? f.decay()->constant : 1.0) * env.env_constant * std::pow(y, env.c2);
    auto k = [&](double x) { return spec.kernel(x, y); };
    const auto pv = detail::transform_point(spec.b0, spec.c0, k, spec.kernel.wavelength(y), e, C, f, y, cfg);
    r.y_grid.push_back(y);
    r.values.push_back(pv.quad.value);
    r.error_estimates.push_back(pv.quad.error);
    r.statuses.push_back(pv.quad.status);
    r.truncation_report.push_back(pv.truncation);
  }
  return r;
}

inline double apply_at(const TransformSpec& spec, const TestFunction& f, double y, const QuadratureConfig& cfg = {}) {
  const double ys[1] = {y};
  return apply(spec, f, ys, cfg, true).values.front();
}

struct PointwiseMode {
  enum Kind { Standard, GM } kind = Standard;
  double lambda = 2.0;
};

// Standard: y^c0 [int_0^{1/y} x^{b0+b1} y^{c1} |f| + int_{1/y}^inf x^{b0+b2} y^{c2} |f|]
// times the envelope constant. GM: y^{c0+c1} int_0^{1/y} x^{b0+b1}|f| +
// y^{c+c0} int_{1/(lambda y)}^inf x^{b-1}|f|, without constants.
inline double pointwise_bound(const TransformSpec& spec, const TestFunction& f, double y, PointwiseMode mode = {},
                              const QuadratureConfig& cfg = {}) {
  detail::check_y(y);
  if (f.is_zero()) return 0.0;
  const auto& env = spec.envelope();
  const double inf = std::numeric_limits<double>::infinity();
  QuadratureConfig c = cfg;
  c.rel_tol = std::max(cfg.rel_tol, 1e-8);
  auto part = [&](double e, double lo, double hi) {
    const QuadResult r = detail::abs_power_integral(f, e, lo, hi, c);
    return r.divergent() ? inf : r.value;
  };
  if (mode.kind == PointwiseMode::Standard) {
    const double near = part(spec.b0 + env.b1, 0.0, 1.0 / y) * std::pow(y, env.c1);
    const double far = part(spec.b0 + env.b2, 1.0 / y, inf) * std::pow(y, env.c2);
    return env.env_constant * std::pow(y, spec.c0) * (near + far);
  }
  if (!spec.primitive) throw lab_error(errc::missing_primitive_bound, spec.label() + " has no primitive bound");
  const auto& pb = *spec.primitive;
  const double near = std::pow(y, spec.c0 + env.c1) * part(spec.b0 + env.b1, 0.0, 1.0 / y);
  const double far = std::pow(y, pb.c + spec.c0) * part(pb.b - 1.0, 1.0 / (mode.lambda * y), inf);
  return near + far;
}

// Ff via G_ell when the moments of orders b0+b1+jk, j < ell, vanish:
// Ff(y) = y^{c0+c1} int x^{b0+b1} f(x) G_ell(xy) dx.
inline TransformResult moment_reduced_apply(const TransformSpec& spec, const TestFunction& f, int ell,
                                            std::span<const double> y_grid, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  const auto series = spec.kernel.series();
  if (!series) throw lab_error(errc::no_series_kernel, spec.label() + " kernel has no power series");
  // (xy)^lead splits as x^b1 inside and y^c1 outside; b1 = c1 = lead.
  const double base_order = spec.b0 + spec.envelope().b1;
  QuadratureConfig tight = cfg;
  tight.rel_tol = 1e-12;
  tight.abs_tol = 1e-300;
  for (int j = 0; j < ell; ++j) {
    const double order = base_order + j * series->k;
    const double m = moment(f, order, tight);
    // Measured against int x^order |f| so the test is scale-free.
    const double scale = std::max(1.0, detail::abs_power_integral(f, order, 0.0, std::numeric_limits<double>::infinity(), tight).value);
    if (std::abs(m) > 1e-10 * scale)
      throw lab_error(errc::moments_not_vanished, "moment of order " + std::to_string(order) + " is " + std::to_string(m));
  }
  const KernelSpec reduced = moment_reduced_kernel(spec.kernel, ell);
  const auto& env = reduced.envelope();
  TransformResult r;
  for (double y : y_grid) {
    detail::check_y(y);
    const double e = (f.decay() ? f.decay()->exponent : 0.0) + base_order + env.b2;
    const double C = (f.decay() ? f.decay()->constant : 1.0) * env.env_constant * std::pow(y, env.c2);
    auto k = [&](double x) { return reduced(x, y); };
    auto pv = detail::transform_point(base_order, spec.c0 + spec.envelope().c1, k,
                                      reduced.wavelength(y), e, C, f, y, cfg);
    r.y_grid.push_back(y);
    r.values.push_back(pv.quad.value);
    r.error_estimates.push_back(pv.quad.error);
    r.statuses.push_back(pv.quad.status);
    r.truncation_report.push_back(pv.truncation);
  }
  return r;
}

}  // namespace pittlab
