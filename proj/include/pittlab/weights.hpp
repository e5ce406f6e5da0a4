#pragma once

// Weights, Lebesgue exponent sets, test-function families and the general
// monotonicity (GM) check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pittlab/error.hpp"
#include "pittlab/kernels.hpp"
#include "pittlab/quadrature.hpp"

namespace pittlab {

struct PowerForm {
  double exponent = 0.0;
};
// x^below for x <= 1, x^above for x > 1.
struct PiecewisePowerForm {
  double below = 0.0;
  double above = 0.0;
};
struct TabulatedForm {
  std::vector<double> log_x;
  std::vector<double> values;
  double slope_lo = 0.0;  // boundary power laws fitted on the outer decades
  double slope_hi = 0.0;
};

using WeightForm = std::variant<PowerForm, PiecewisePowerForm, TabulatedForm>;

class Weight {
 public:
  explicit Weight(WeightForm form) : form_(std::move(form)) {}

  static Weight power(double exponent) { return Weight(PowerForm{exponent}); }
  static Weight piecewise(double below, double above) { return Weight(PiecewisePowerForm{below, above}); }

  // Samples at increasing positive x, nonnegative values.
  static Weight tabulated(std::span<const double> xs, std::span<const double> vs) {
    if (xs.size() != vs.size() || xs.size() < 2) throw lab_error(errc::config, "tabulated weight needs >= 2 samples");
    TabulatedForm t;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(xs[i] > 0.0) || (i > 0 && !(xs[i] > xs[i - 1])))
        throw lab_error(errc::config, "tabulated abscissae must be positive and increasing");
      if (!(vs[i] >= 0.0)) throw lab_error(errc::config, "tabulated weight values must be nonnegative");
      t.log_x.push_back(std::log(xs[i]));
      t.values.push_back(vs[i]);
    }
    t.slope_lo = boundary_slope(t, true);
    t.slope_hi = boundary_slope(t, false);
    return Weight(std::move(t));
  }

  const WeightForm& form() const { return form_; }

  double operator()(double x) const {
    return std::visit([x](const auto& f) { return eval(f, x); }, form_);
  }

  // Local power exponents at 0 and infinity (tabulated: fitted boundary laws).
  double exponent_at_zero() const {
    return std::visit(
        [](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PowerForm>) return f.exponent;
          else if constexpr (std::is_same_v<T, PiecewisePowerForm>) return f.below;
          else return f.slope_lo;
        },
        form_);
  }
  double exponent_at_infinity() const {
    return std::visit(
        [](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PowerForm>) return f.exponent;
          else if constexpr (std::is_same_v<T, PiecewisePowerForm>) return f.above;
          else return f.slope_hi;
        },
        form_);
  }

 private:
  static double eval(const PowerForm& f, double x) { return std::pow(x, f.exponent); }
  static double eval(const PiecewisePowerForm& f, double x) {
    return std::pow(x, x <= 1.0 ? f.below : f.above);
  }
  static double eval(const TabulatedForm& t, double x) {
    const double lx = std::log(x);
    if (lx <= t.log_x.front()) return t.values.front() * std::exp(t.slope_lo * (lx - t.log_x.front()));
    if (lx >= t.log_x.back()) return t.values.back() * std::exp(t.slope_hi * (lx - t.log_x.back()));
    const auto it = std::upper_bound(t.log_x.begin(), t.log_x.end(), lx);
    const auto i = static_cast<std::size_t>(it - t.log_x.begin());
    const double s = (lx - t.log_x[i - 1]) / (t.log_x[i] - t.log_x[i - 1]);
    const double v0 = t.values[i - 1];
    const double v1 = t.values[i];
    if (v0 > 0.0 && v1 > 0.0) return std::exp((1.0 - s) * std::log(v0) + s * std::log(v1));
    return (1.0 - s) * v0 + s * v1;
  }

  // Least-squares slope of log v against log x over the outermost decade.
  static double boundary_slope(const TabulatedForm& t, bool low) {
    const double ten = std::log(10.0);
    const double edge = low ? t.log_x.front() : t.log_x.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.log_x.size(); ++i) {
      if (std::abs(t.log_x[i] - edge) > ten + 1e-12 || !(t.values[i] > 0.0)) continue;
      const double ly = std::log(t.values[i]);
      sx += t.log_x[i];
      sy += ly;
      sxx += t.log_x[i] * t.log_x[i];
      sxy += t.log_x[i] * ly;
      ++n;
    }
    if (n < 2) return 0.0;
    const double den = n * sxx - sx * sx;
    return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  }

  WeightForm form_;
};

// The model pair s = w = x^delta.
inline std::pair<Weight, Weight> model_pair(double delta) { return {Weight::power(delta), Weight::power(delta)}; }

// 1 < p <= q < inf and a in [1, inf]; duals follow 1/p + 1/p' = 1.
struct ExponentSet {
  double p = 2.0;
  double q = 2.0;
  double a = 1.0;

  void validate() const {
    if (!(p > 1.0) || !(q >= p) || !std::isfinite(q))
      throw lab_error(errc::config, "exponents need 1 < p <= q < inf");
    if (!(a >= 1.0)) throw lab_error(errc::config, "parameter a must lie in [1, inf]");
  }
  double p_dual() const { return p / (p - 1.0); }
  double q_dual() const { return q / (q - 1.0); }
  // 1/a' = 1 - 1/a, with a' = inf when a = 1.
  double inv_a_dual() const { return std::isinf(a) ? 1.0 : 1.0 - 1.0 / a; }
};

struct GMWitness {
  double C = 1.0;
  double lambda = 2.0;
};

enum class Side { below, above };  // (0, r) or (r, inf)

struct TruncatedPower {
  double sigma;
  double r;
  Side side;
};
struct LogCounterexample {
  int N;
  double b0_plus_b1;
};
// sum_j c_j x^sigma on [nodes_j, nodes_{j+1}).
struct VanishingMoments {
  std::vector<double> nodes;
  std::vector<double> coeffs;
  double sigma;
};
struct CustomFunction {
  std::function<double(double)> eval;
};

using FunctionFamily = std::variant<TruncatedPower, LogCounterexample, VanishingMoments, CustomFunction>;

// Immutable test function with its support, breakpoints, moments known to
// vanish, and an optional decay bound on an unbounded support.
class TestFunction {
 public:
  TestFunction(FunctionFamily family, double lo, double hi, std::vector<double> breaks,
               std::vector<double> vanished = {}, std::optional<PowerDecay> decay = std::nullopt, double scale = 1.0)
      : family_(std::move(family)),
        lo_(lo),
        hi_(hi),
        breaks_(std::move(breaks)),
        vanished_(std::move(vanished)),
        decay_(decay),
        scale_(scale) {}

  double operator()(double x) const {
    if (!(x > lo_) || !(x < hi_)) return 0.0;
    return scale_ * std::visit([x](const auto& f) { return eval(f, x); }, family_);
  }

  const FunctionFamily& family() const { return family_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  // Support ends and interior discontinuities, ascending.
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& vanished_moments() const { return vanished_; }
  const std::optional<PowerDecay>& decay() const { return decay_; }
  const std::optional<GMWitness>& gm_witness() const { return gm_; }
  double scale() const { return scale_; }
  bool is_zero() const { return scale_ == 0.0; }

  TestFunction scaled(double c) const {
    TestFunction t = *this;
    t.scale_ *= c;
    if (t.decay_) t.decay_->constant *= std::abs(c);
    return t;
  }
  TestFunction with_witness(GMWitness w) const {
    TestFunction t = *this;
    t.gm_ = w;
    return t;
  }

 private:
  static double eval(const TruncatedPower& f, double x) { return std::pow(x, f.sigma); }
  static double eval(const LogCounterexample& f, double x) {
    const double v = std::pow(x, -(f.b0_plus_b1 + 1.0));
    return x < 1.0 ? v : -v;
  }
  static double eval(const VanishingMoments& f, double x) {
    const auto it = std::upper_bound(f.nodes.begin(), f.nodes.end(), x);
    const auto j = static_cast<std::ptrdiff_t>(it - f.nodes.begin()) - 1;
    if (j < 0 || j >= static_cast<std::ptrdiff_t>(f.coeffs.size())) return 0.0;
    return f.coeffs[static_cast<std::size_t>(j)] * std::pow(x, f.sigma);
  }
  static double eval(const CustomFunction& f, double x) { return f.eval(x); }

  FunctionFamily family_;
  double lo_;
  double hi_;
  std::vector<double> breaks_;
  std::vector<double> vanished_;
  std::optional<PowerDecay> decay_;
  std::optional<GMWitness> gm_;
  double scale_;
};

// x^sigma on (0, r) or on (r, inf).
inline TestFunction make_truncated_power(double sigma, double r, Side side) {
  if (!(r > 0.0)) throw lab_error(errc::domain, "cutoff r must be positive");
  if (side == Side::below) return TestFunction(TruncatedPower{sigma, r, side}, 0.0, r, {0.0, r});
  const double inf = std::numeric_limits<double>::infinity();
  return TestFunction(TruncatedPower{sigma, r, side}, r, inf, {r, inf}, {}, PowerDecay{1.0, sigma});
}

// f_N = x^{-(b0+b1+1)} (chi_(1/N,1) - chi_(1,N)); its (b0+b1)-moment is 0.
inline TestFunction make_log_counterexample(int N, double b0_plus_b1) {
  if (N < 2) throw lab_error(errc::domain, "N must be >= 2");
  const double n = static_cast<double>(N);
  return TestFunction(LogCounterexample{N, b0_plus_b1}, 1.0 / n, n, {1.0 / n, 1.0, n}, {b0_plus_b1});
}

inline TestFunction make_custom_function(std::function<double(double)> f, double lo, double hi,
                                         std::vector<double> breaks = {},
                                         std::optional<PowerDecay> decay = std::nullopt) {
  if (breaks.empty()) breaks = {lo, hi};
  return TestFunction(CustomFunction{std::move(f)}, lo, hi, std::move(breaks), {}, decay);
}

// int_a^b x^e dx in closed form.
inline double power_integral(double e, double a, double b) {
  if (std::abs(e + 1.0) < 1e-14) return std::log(b / a);
  return (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
}

// Signed moment int x^m f(x) dx by quadrature over the support pieces.
inline double moment(const TestFunction& f, double m, const QuadratureConfig& cfg = {}) {
  auto g = [&](double x) { return std::pow(x, m) * f(x); };
  if (std::isinf(f.support_hi())) {
    const auto& br = f.breakpoints();
    std::vector<double> pts(br.begin(), br.end() - 1);
    QuadResult r = integrate(g, std::span<const double>(pts), cfg);
    const double d = f.decay() ? f.decay()->exponent + m : 0.0;
    r += integrate_to_infinity(g, pts.back(), cfg, PowerDecay{f.decay() ? f.decay()->constant : 1.0, d});
    return r.value;
  }
  return integrate(g, std::span<const double>(f.breakpoints()), cfg).value;
}

// Norm request for the vanishing-moment normalization: int x^weight_exponent |f|^p = 1.
struct PowerNorm {
  double p = 2.0;
  double weight_exponent = 0.0;
};

// Piecewise x^sigma combination on the node intervals with the listed power
// moments equal to zero. Coefficients come from closed-form moments with the
// first coefficient pinned to 1; the minimum-norm solution fixes the rest.
inline TestFunction make_vanishing_moment_function(std::span<const double> orders, std::span<const double> nodes,
                                                   double sigma, std::optional<PowerNorm> norm = std::nullopt) {
  if (nodes.size() < orders.size() + 1 || nodes.size() < 2)
    throw lab_error(errc::singular_system, "need at least one more node than moment orders");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!(nodes[i] > 0.0) || (i > 0 && !(nodes[i] > nodes[i - 1])))
      throw lab_error(errc::domain, "nodes must be positive and increasing");
  const std::size_t J = nodes.size() - 1;
  const std::size_t n = orders.size();
  std::vector<double> c(J, 0.0);
  c[0] = 1.0;
  if (n > 0) {
    if (J - 1 < n) throw lab_error(errc::singular_system, "moment system has only the trivial solution");
    // M' c' = -M_0 with M_ij = int_{node_j}^{node_j+1} x^{order_i + sigma}.
    std::vector<std::vector<double>> M(n, std::vector<double>(J));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < J; ++j) M[i][j] = power_integral(orders[i] + sigma, nodes[j], nodes[j + 1]);
    // Normal equations (M' M'^T) lambda = -M_0, then c' = M'^T lambda.
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 1; j < J; ++j) A[i][k] += M[i][j] * M[k][j];
      A[i][n] = -M[i][0];
    }
    // Gaussian elimination with partial pivoting on the scaled system.
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
      std::swap(A[col], A[piv]);
      double scale = 0.0;
      for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(A[col][k]));
      if (!(std::abs(A[col][col]) > 1e-13 * scale)) throw lab_error(errc::singular_system, "moment matrix is rank-deficient");
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const double m = A[r][col] / A[col][col];
        for (std::size_t k = col; k <= n; ++k) A[r][k] -= m * A[col][k];
      }
    }
    for (std::size_t j = 1; j < J; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += M[i][j] * A[i][n] / A[i][i];
      c[j] = s;
    }
  }
  double scale = 1.0;
  if (norm) {
    double acc = 0.0;
    for (std::size_t j = 0; j < J; ++j)
      acc += std::pow(std::abs(c[j]), norm->p) * power_integral(norm->weight_exponent + norm->p * sigma, nodes[j], nodes[j + 1]);
    scale = 1.0 / std::pow(acc, 1.0 / norm->p);
  } else {
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    scale = 1.0 / cmax;
  }
  for (double& v : c) v *= scale;
  std::vector<double> br(nodes.begin(), nodes.end());
  TestFunction f(VanishingMoments{br, c, sigma}, nodes.front(), nodes.back(), br,
                 std::vector<double>(orders.begin(), orders.end()));
  QuadratureConfig tight;
  tight.rel_tol = 1e-13;
  tight.abs_tol = 1e-16;
  for (double m : orders) {
    const double mv = moment(f, m, tight);
    if (!(std::abs(mv) <= 1e-12)) throw lab_error(errc::moments_not_vanished, "constructed moment " + std::to_string(m) + " is " + std::to_string(mv));
  }
  return f;
}

struct GMCheckConfig {
  std::vector<double> lambdas = {1.25, 1.5, 2.0, 4.0, 8.0};
  double c_cap = 1e6;
  double lo = 1e-3;
  double hi = 1e3;
  int per_decade = 40;
  int refine = 10;
  // The fitted constant must not grow faster than this factor from the
  // second-to-last decade to the last; a constant that grows with x is not
  // a witness.
  double growth_limit = 2.0;
};

struct GMFit {
  std::optional<GMWitness> witness;
  double best_C = std::numeric_limits<double>::infinity();
  double best_lambda = 0.0;
  std::vector<double> decade_C;  // per-decade constants for the best lambda
};

// Fits C for each lambda so that int_x^{2x} |df| <= (C/x) int_{x/lambda}^{lambda x} |f|
// on the x grid. Variation is the sum of jumps on a refined subgrid.
inline GMFit check_gm(const TestFunction& f, const GMCheckConfig& cfg = {}) {
  const int n = static_cast<int>(std::round(std::log10(cfg.hi / cfg.lo) * cfg.per_decade)) + 1;
  const auto xs = log_grid(cfg.lo, cfg.hi, n);
  const int sub = static_cast<int>(std::ceil(std::log10(2.0) * cfg.per_decade * cfg.refine));
  const int decades = static_cast<int>(std::round(std::log10(cfg.hi / cfg.lo)));
  QuadratureConfig qc;
  qc.rel_tol = 1e-8;
  qc.abs_tol = 1e-300;
  auto absf = [&](double t) { return std::abs(f(t)); };

  std::vector<double> var(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    double v = 0.0;
    double prev = f(x);
    for (int k = 1; k <= sub; ++k) {
      const double t = x * std::pow(2.0, static_cast<double>(k) / sub);
      const double cur = f(t);
      v += std::abs(cur - prev);
      prev = cur;
    }
    var[i] = v;
  }

  GMFit out;
  for (double lambda : cfg.lambdas) {
    std::vector<double> dec(static_cast<std::size_t>(std::max(decades, 1)), 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      if (var[i] == 0.0) continue;
      std::vector<double> pts{x / lambda};
      for (double b : f.breakpoints())
        if (b > x / lambda && b < lambda * x) pts.push_back(b);
      pts.push_back(lambda * x);
      const double avg = integrate(absf, std::span<const double>(pts), qc).value;
      if (!(avg > 0.0)) {
        feasible = false;
        break;
      }
      const double C = x * var[i] / avg;
      auto d = static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(std::log10(x / cfg.lo) + 1e-9)), 0, decades - 1));
      dec[d] = std::max(dec[d], C);
    }
    if (!feasible) continue;
    const double C = *std::max_element(dec.begin(), dec.end());
    if (C < out.best_C) {
      out.best_C = C;
      out.best_lambda = lambda;
      out.decade_C = dec;
    }
  }
  if (out.best_lambda > 0.0 && out.best_C <= cfg.c_cap) {
    const auto& d = out.decade_C;
    const double last = d.back();
    const double prev = d.size() >= 2 ? d[d.size() - 2] : last;
    const bool grows = prev > 0.0 && last > cfg.growth_limit * prev;
    if (!grows) out.witness = GMWitness{std::max(out.best_C, 1e-300), out.best_lambda};
  }
  return out;
}

}  // namespace pittlab
