#pragma once

// Kernels K(x, y) with power-type envelopes, envelope verification, and
// primitive-function estimates for the Bessel and Struve kernels.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pittlab/error.hpp"
#include "pittlab/quadrature.hpp"
#include "pittlab/special.hpp"

namespace pittlab {

// |K| <= env_constant * min{x^b1 y^c1, x^b2 y^c2}; exact means two-sided.
struct PowerEnvelope {
  double b1 = 0.0;
  double c1 = 0.0;
  double b2 = 0.0;
  double c2 = 0.0;
  bool exact = false;
  double env_constant = 1.0;

  bool balanced() const { return std::abs((b1 - b2) - (c1 - c2)) < 1e-12; }
  bool strict() const { return balanced() && b1 - b2 > 0.0; }

  // The regime split is at xy = 1.
  double shape(double x, double y) const {
    return x * y <= 1.0 ? std::pow(x, b1) * std::pow(y, c1) : std::pow(x, b2) * std::pow(y, c2);
  }
  double operator()(double x, double y) const { return env_constant * shape(x, y); }
};

// K(x, y) = (xy)^lead * sum_m a_m (xy)^{k m}.
struct PowerSeries {
  int k = 2;
  double lead = 0.0;
  double a0 = 1.0;
  std::function<double(int)> ratio;  // a_m / a_{m-1}

  double coefficient(int m) const {
    double a = a0;
    for (int j = 1; j <= m; ++j) a *= ratio(j);
    return a;
  }
};

class KernelSpec;

struct BesselJ {
  double alpha;
};
struct StruveH {
  double alpha;
};
struct Sine {};
struct Cosine {};
struct ModelMinKernel {
  double delta;
};
struct MomentReduced {
  std::shared_ptr<const KernelSpec> base;
  int ell;
};
struct CustomKernel {
  std::function<double(double, double)> eval;
  double wavelength_scale = 0.0;  // wavelength in x is wavelength_scale / y
};

using KernelKind = std::variant<BesselJ, StruveH, Sine, Cosine, ModelMinKernel, MomentReduced, CustomKernel>;

class KernelSpec {
 public:
  KernelSpec(KernelKind kind, PowerEnvelope envelope) : kind_(std::move(kind)), envelope_(envelope) {}

  const KernelKind& kind() const { return kind_; }
  const PowerEnvelope& envelope() const { return envelope_; }
  void set_env_constant(double c) {
    if (!(c > 0.0)) throw lab_error(errc::domain, "env_constant must be positive");
    envelope_.env_constant = c;
  }

  double operator()(double x, double y) const {
    return std::visit([&](const auto& k) { return eval(k, x, y); }, kind_);
  }

  // True when K depends on x and y only through xy.
  bool product_kernel() const {
    return !std::holds_alternative<CustomKernel>(kind_);
  }

  // Oscillation wavelength in x at fixed y; 0 when K does not oscillate.
  double wavelength(double y) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (std::holds_alternative<BesselJ>(kind_) || std::holds_alternative<StruveH>(kind_) ||
        std::holds_alternative<Sine>(kind_) || std::holds_alternative<Cosine>(kind_))
      return two_pi / y;
    if (const auto* m = std::get_if<MomentReduced>(&kind_)) return m->base->wavelength(y);
    if (const auto* c = std::get_if<CustomKernel>(&kind_)) return c->wavelength_scale > 0 ? c->wavelength_scale / y : 0.0;
    return 0.0;
  }

  // Series data for kernels of the form (xy)^lead sum a_m (xy)^{km}.
  std::optional<PowerSeries> series() const {
    if (const auto* b = std::get_if<BesselJ>(&kind_)) {
      const double a = b->alpha;
      return PowerSeries{2, 0.0, 1.0, [a](int m) { return -1.0 / (4.0 * m * (a + m)); }};
    }
    if (std::holds_alternative<Sine>(kind_))
      return PowerSeries{2, 1.0, 1.0, [](int m) { return -1.0 / ((2.0 * m) * (2.0 * m + 1.0)); }};
    if (std::holds_alternative<Cosine>(kind_))
      return PowerSeries{2, 0.0, 1.0, [](int m) { return -1.0 / ((2.0 * m - 1.0) * (2.0 * m)); }};
    if (const auto* s = std::get_if<StruveH>(&kind_)) {
      const double a = s->alpha;
      const double a0 = std::pow(2.0, -(a + 1.0)) / (gamma_fn(1.5) * gamma_fn(a + 1.5));
      return PowerSeries{2, a + 1.0, a0, [a](int m) { return -1.0 / (4.0 * (m + 0.5) * (m + a + 0.5)); }};
    }
    return std::nullopt;
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, BesselJ>) return "BesselJ(" + std::to_string(k.alpha) + ")";
          else if constexpr (std::is_same_v<T, StruveH>) return "StruveH(" + std::to_string(k.alpha) + ")";
          else if constexpr (std::is_same_v<T, Sine>) return "Sine";
          else if constexpr (std::is_same_v<T, Cosine>) return "Cosine";
          else if constexpr (std::is_same_v<T, ModelMinKernel>) return "ModelMin(" + std::to_string(k.delta) + ")";
          else if constexpr (std::is_same_v<T, MomentReduced>)
            return "MomentReduced(" + k.base->name() + ", ell=" + std::to_string(k.ell) + ")";
          else return "Custom";
        },
        kind_);
  }

 private:
  static double eval(const BesselJ& k, double x, double y) { return bessel_j(k.alpha, x * y); }
  static double eval(const StruveH& k, double x, double y) { return struve_h(k.alpha, x * y); }
  static double eval(const Sine&, double x, double y) { return std::sin(x * y); }
  static double eval(const Cosine&, double x, double y) { return std::cos(x * y); }
  static double eval(const ModelMinKernel& k, double x, double y) {
    const double z = x * y;
    return z <= 1.0 ? 1.0 : std::pow(z, -0.5 * k.delta);
  }
  static double eval(const CustomKernel& k, double x, double y) { return k.eval(x, y); }
  static double eval(const MomentReduced& k, double x, double y);

  KernelKind kind_;
  PowerEnvelope envelope_;
};

// G_ell(z) = sum_{m >= ell} a_m z^{km}: tail series for z <= 1, kernel minus
// partial sum for z > 1.
inline double moment_reduced_value(const KernelSpec& base, int ell, double z) {
  const auto s = base.series();
  if (!s) throw lab_error(errc::no_series_kernel, base.name() + " has no power series");
  const double zk = std::pow(z, s->k);
  if (z <= 1.0) {
    double a = s->coefficient(ell);
    double term = a * std::pow(zk, ell);
    double sum = term;
    for (int m = ell + 1; m < ell + 200; ++m) {
      term *= s->ratio(m) * zk;
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  double partial = 0.0;
  double a = s->a0;
  double zm = 1.0;
  for (int m = 0; m < ell; ++m) {
    if (m > 0) a *= s->ratio(m);
    partial += a * zm;
    zm *= zk;
  }
  return base(z, 1.0) / std::pow(z, s->lead) - partial;
}

inline double KernelSpec::eval(const MomentReduced& k, double x, double y) {
  return moment_reduced_value(*k.base, k.ell, x * y);
}

// Envelope report over a grid of (x, y) points.
struct EnvelopeReport {
  double max_ratio = 0.0;
  double min_ratio = 0.0;  // over unmasked points; meaningful for exact envelopes
  int masked = 0;
  int points = 0;
};

// Points with |K| < 1e-3 * envelope sit near kernel zeros and are excluded
// from the lower ratio.
inline EnvelopeReport check_envelope(const KernelSpec& kernel, std::span<const std::pair<double, double>> grid) {
  EnvelopeReport r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  const auto& env = kernel.envelope();
  for (const auto& [x, y] : grid) {
    const double shape = env.shape(x, y);
    const double ratio = std::abs(kernel(x, y)) / shape;
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (ratio < 1e-3) ++r.masked;
    else r.min_ratio = std::min(r.min_ratio, ratio);
    ++r.points;
  }
  if (!std::isfinite(r.min_ratio)) r.min_ratio = 0.0;
  return r;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return g;
}

// The n x n log-spaced grid on [lo, hi]^2.
inline std::vector<std::pair<double, double>> envelope_grid(int n = 200, double lo = 1e-3, double hi = 1e3) {
  const auto g = log_grid(lo, hi, n);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (double x : g)
    for (double y : g) out.emplace_back(x, y);
  return out;
}

// Max ratio |K| / envelope shape on the standard 200 x 200 grid. Product
// kernels with balanced envelopes only see the 2n-1 distinct products.
inline double fit_envelope_constant(const KernelSpec& kernel, int n = 200) {
  const auto& env = kernel.envelope();
  const bool by_product =
      kernel.product_kernel() && std::abs(env.b1 - env.c1) < 1e-15 && std::abs(env.b2 - env.c2) < 1e-15;
  if (!by_product) return check_envelope(kernel, envelope_grid(n)).max_ratio;
  std::vector<std::pair<double, double>> diag;
  for (int s = 0; s <= 2 * (n - 1); ++s) {
    const double z = std::pow(10.0, -6.0 + 6.0 * s / (n - 1));
    diag.emplace_back(z, 1.0);
  }
  return check_envelope(kernel, diag).max_ratio;
}

inline KernelSpec with_fitted_constant(KernelSpec k) {
  k.set_env_constant(std::max(fit_envelope_constant(k), 1e-300));
  return k;
}

inline KernelSpec bessel_kernel(double alpha) {
  if (!(alpha > -1.0)) throw lab_error(errc::domain, "BesselJ order must exceed -1");
  const double e = -alpha - 0.5;
  return with_fitted_constant(KernelSpec(BesselJ{alpha}, {0.0, 0.0, e, e, false, 1.0}));
}

// Envelope exponent for large argument is alpha - 1 when alpha >= 1/2,
// -1/2 otherwise; two-sided only for alpha > 1/2.
inline KernelSpec struve_kernel(double alpha) {
  if (!(alpha > -0.5)) throw lab_error(errc::domain, "StruveH order must exceed -1/2");
  const double e = alpha >= 0.5 ? alpha - 1.0 : -0.5;
  return with_fitted_constant(KernelSpec(StruveH{alpha}, {alpha + 1.0, alpha + 1.0, e, e, alpha > 0.5, 1.0}));
}

inline KernelSpec sine_kernel() { return KernelSpec(Sine{}, {1.0, 1.0, 0.0, 0.0, false, 1.0}); }
inline KernelSpec cosine_kernel() { return KernelSpec(Cosine{}, {0.0, 0.0, 0.0, 0.0, false, 1.0}); }

inline KernelSpec model_min_kernel(double delta) {
  if (!(delta > 0.0)) throw lab_error(errc::domain, "ModelMin exponent must be positive");
  return KernelSpec(ModelMinKernel{delta}, {0.0, 0.0, -0.5 * delta, -0.5 * delta, true, 1.0});
}

inline KernelSpec custom_kernel(std::function<double(double, double)> eval, PowerEnvelope envelope,
                                double wavelength_scale = 0.0) {
  return KernelSpec(CustomKernel{std::move(eval), wavelength_scale}, envelope);
}

// G_ell envelope is min{(xy)^{k ell}, (xy)^{k(ell-1)}}.
inline KernelSpec moment_reduced_kernel(const KernelSpec& base, int ell) {
  const auto s = base.series();
  if (!s) throw lab_error(errc::no_series_kernel, base.name() + " has no power series");
  if (ell < 1) throw lab_error(errc::domain, "ell must be >= 1");
  const double hi = s->k * ell;
  const double lo = s->k * (ell - 1.0);
  return with_fitted_constant(
      KernelSpec(MomentReduced{std::make_shared<const KernelSpec>(base), ell}, {hi, hi, lo, lo, false, 1.0}));
}

// |(x^a H_a)'(x) - x^a H_{a-1}(x)| with a centered difference of step h.
inline double struve_derivative_check(double alpha, double x, double h) {
  if (!(alpha > 0.5)) throw lab_error(errc::domain, "derivative identity needs alpha > 1/2");
  if (!(x > 0.0) || !(h > 0.0) || !(h < x)) throw lab_error(errc::domain, "need 0 < h < x");
  auto F = [alpha](double t) { return std::pow(t, alpha) * struve_h(alpha, t); };
  const double diff = (F(x + h) - F(x - h)) / (2.0 * h);
  return std::abs(diff - std::pow(x, alpha) * struve_h(alpha - 1.0, x));
}

// |g| <= C x^b y^c for xy >= 1, where dg/dx = x^nu * (kernel factor).
struct PrimitiveBound {
  double b = 0.0;
  double c = 0.0;
  double nu = 0.0;
  double bound_constant = 1.0;

  double operator()(double x, double y) const { return bound_constant * std::pow(x, b) * std::pow(y, c); }
};

namespace detail {

// int_0^x t^nu k(ty) dt, split at 1/y and at the special-function crossover.
template <class K>
QuadResult kernel_primitive(K&& k, double nu, double y, double x, const QuadratureConfig& cfg) {
  auto g = [&](double t) { return std::pow(t, nu) * k(t * y); };
  std::vector<double> pts{0.0};
  for (double b : {1.0 / y, series_crossover / y})
    if (b < x) pts.push_back(b);
  pts.push_back(x);
  return integrate(g, std::span<const double>(pts), cfg, 2.0 * std::numbers::pi / y);
}

}  // namespace detail

// h^nu_{alpha,y}(x) = int_0^x t^nu H_alpha(t y) dt.
inline QuadResult struve_primitive(double alpha, double nu, double y, double x, const QuadratureConfig& cfg = {}) {
  if (!(alpha > -0.5)) throw lab_error(errc::domain, "struve_primitive needs alpha > -1/2");
  if (!(nu >= 0.5)) throw lab_error(errc::domain, "struve_primitive needs nu >= 1/2");
  if (!(x > 0.0) || !(y > 0.0)) throw lab_error(errc::domain, "struve_primitive needs x, y > 0");
  return detail::kernel_primitive([alpha](double z) { return struve_h(alpha, z); }, nu, y, x, cfg);
}

// y^{-1} x^nu min{(xy)^{alpha+2}, (xy)^alpha}.
inline double struve_primitive_shape(double alpha, double nu, double y, double x) {
  const double z = x * y;
  return std::pow(x, nu) / y * std::min(std::pow(z, alpha + 2.0), std::pow(z, alpha));
}

// g^nu_{alpha,y}(x) = int_0^x t^nu j_alpha(t y) dt.
inline QuadResult bessel_primitive(double alpha, double nu, double y, double x, const QuadratureConfig& cfg = {}) {
  if (!(x > 0.0) || !(y > 0.0)) throw lab_error(errc::domain, "bessel_primitive needs x, y > 0");
  return detail::kernel_primitive([alpha](double z) { return bessel_j(alpha, z); }, nu, y, x, cfg);
}

struct PrimitiveCheck {
  double constant = 0.0;
  bool violated = false;  // constant above the cap
  int points = 0;
};

// Smallest C with |g^nu| <= C x^{nu-alpha-1/2} y^{-alpha-3/2} on grid points
// with xy >= 1.
inline PrimitiveCheck bessel_primitive_bound_check(double alpha, double nu, double y, std::span<const double> x_grid,
                                                   double cap = 1e6, const QuadratureConfig& cfg = {}) {
  if (!(alpha >= -0.5)) throw lab_error(errc::domain, "bessel_primitive_bound_check needs alpha >= -1/2");
  std::vector<double> xs(x_grid.begin(), x_grid.end());
  std::sort(xs.begin(), xs.end());
  PrimitiveCheck out;
  double acc = 0.0;
  double prev = 0.0;
  auto k = [alpha, nu, y](double t) { return std::pow(t, nu) * bessel_j(alpha, t * y); };
  for (double x : xs) {
    if (!(x > 0.0)) continue;
    // Accumulate the primitive piecewise along the sorted grid.
    if (prev == 0.0) acc = bessel_primitive(alpha, nu, y, x, cfg).value;
    else acc += integrate(k, prev, x, cfg, 2.0 * std::numbers::pi / y).value;
    prev = x;
    if (x * y < 1.0) continue;
    const double bound = std::pow(x, nu - alpha - 0.5) * std::pow(y, -alpha - 1.5);
    out.constant = std::max(out.constant, std::abs(acc) / bound);
    ++out.points;
  }
  out.violated = !(out.constant <= cap);
  return out;
}

}  // namespace pittlab
