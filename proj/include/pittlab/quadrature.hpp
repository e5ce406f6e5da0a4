#pragma once

// Adaptive Gauss-Kronrod integration on finite and semi-infinite intervals,
// decade-extension handling of improper endpoints, and weighted L^p norms.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <variant>
#include <vector>

#include "pittlab/error.hpp"

namespace pittlab {

struct TailBound {};
struct FixedCutoff {
  double x = 0.0;
};
using Truncation = std::variant<TailBound, FixedCutoff>;

struct QuadratureConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  int max_panels = 4096;  // bisections allowed beyond the initial mesh
  Truncation truncation = TailBound{};

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw lab_error(errc::config, "quadrature tolerances must be positive");
    if (max_panels < 1) throw lab_error(errc::config, "max_panels must be >= 1");
  }
};

enum class QuadStatus { converged, non_convergence, divergent };

inline const char* to_string(QuadStatus s) {
  switch (s) {
    case QuadStatus::converged: return "Converged";
    case QuadStatus::non_convergence: return "NonConvergence";
    case QuadStatus::divergent: return "Divergent";
  }
  return "Unknown";
}

// Where an improper integral was found to diverge.
enum class DivergenceSite { none, at_zero, at_infinity };

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  QuadStatus status = QuadStatus::converged;
  int panels = 0;
  DivergenceSite site = DivergenceSite::none;

  bool converged() const { return status == QuadStatus::converged; }
  bool divergent() const { return status == QuadStatus::divergent; }
};

inline QuadResult& operator+=(QuadResult& a, const QuadResult& b) {
  a.value += b.value;
  a.error += b.error;
  a.panels += b.panels;
  if (b.status == QuadStatus::divergent || (b.status == QuadStatus::non_convergence && a.converged())) {
    a.status = b.status;
    if (b.site != DivergenceSite::none) a.site = b.site;
  }
  return a;
}

// Deterministic pairwise summation; the tree depends only on the order of xs.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const auto half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace detail {

inline constexpr std::array<double, 11> gk21_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> gk21_kronrod = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208745600774, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> gk21_gauss = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double floor;  // rounding floor of the error estimate

  double excess() const { return std::max(0.0, error - 1.0001 * floor); }
};

template <class F>
Panel gk21(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 21> fv{};
  fv[20] = f(c);
  for (int j = 0; j < 10; ++j) {
    const double dx = h * gk21_nodes[j];
    fv[2 * j] = f(c - dx);
    fv[2 * j + 1] = f(c + dx);
  }
  double rk = gk21_kronrod[10] * fv[20];
  double rg = 0.0;
  double rabs = std::abs(rk);
  for (int j = 0; j < 10; ++j) {
    const double pair = fv[2 * j] + fv[2 * j + 1];
    rk += gk21_kronrod[j] * pair;
    rabs += gk21_kronrod[j] * (std::abs(fv[2 * j]) + std::abs(fv[2 * j + 1]));
    if (j % 2 == 1) rg += gk21_gauss[j / 2] * pair;
  }
  const double mean = 0.5 * rk;
  double rasc = gk21_kronrod[10] * std::abs(fv[20] - mean);
  for (int j = 0; j < 10; ++j)
    rasc += gk21_kronrod[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  double err = std::abs((rk - rg) * h);
  rasc *= std::abs(h);
  rabs *= std::abs(h);
  if (rasc != 0.0 && err != 0.0) err = rasc * std::min(1.0, std::pow(200.0 * err / rasc, 1.5));
  const double floor = 50.0 * eps * rabs;
  err = std::max(err, floor);
  if (!std::isfinite(rk * h)) err = std::numeric_limits<double>::infinity();
  return {a, b, rk * h, err, floor};
}

inline bool splittable(const Panel& p) {
  const double floor = std::max(1e-15, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(p.b));
  return (p.b - p.a) > floor;
}

}  // namespace detail

// Adaptive integration of f over [lo, hi] with the given interior breakpoints.
// A positive wavelength caps every initial panel at half a wavelength.
template <class F>
QuadResult integrate(F&& f, std::span<const double> points, const QuadratureConfig& cfg,
                     double wavelength = 0.0) {
  using detail::Panel;
  QuadResult out;
  if (points.size() < 2) return out;
  std::vector<Panel> done;
  auto worse = [](const Panel& l, const Panel& r) { return l.excess() < r.excess(); };
  std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> heap(worse);

  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    if (!(b > a)) continue;
    int n = 1;
    if (wavelength > 0.0) n = static_cast<int>(std::ceil((b - a) / (0.5 * wavelength)));
    n = std::max(n, 1);
    for (int k = 0; k < n; ++k) {
      const double pa = (k == 0) ? a : a + (b - a) * k / n;
      const double pb = (k == n - 1) ? b : a + (b - a) * (k + 1) / n;
      heap.push(detail::gk21(f, pa, pb));
    }
  }

  // Running sums; recomputed exactly on exit.
  double value = 0.0;
  double error = 0.0;
  {
    auto copy = heap;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().excess();
      copy.pop();
    }
  }
  int bisections = 0;
  while (!heap.empty() && error > std::max(cfg.rel_tol * std::abs(value), cfg.abs_tol)) {
    if (bisections >= cfg.max_panels) break;
    const Panel worst = heap.top();
    if (!std::isfinite(worst.error) && !std::isfinite(worst.value)) break;
    heap.pop();
    if (!detail::splittable(worst)) {
      error -= worst.excess();
      done.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = detail::gk21(f, worst.a, mid);
    const Panel right = detail::gk21(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.excess() + right.excess() - worst.excess();
    heap.push(left);
    heap.push(right);
    ++bisections;
  }
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  std::vector<double> vals(done.size());
  std::vector<double> errs(done.size());
  std::vector<double> excess(done.size());
  for (std::size_t i = 0; i < done.size(); ++i) {
    vals[i] = done[i].value;
    errs[i] = done[i].error;
    excess[i] = done[i].excess();
  }
  out.value = pairwise_sum(vals);
  out.error = pairwise_sum(errs);
  out.panels = static_cast<int>(done.size());
  // Error that sits at the rounding floor cannot be reduced and does not count
  // against convergence.
  const double reducible = pairwise_sum(excess);
  out.status = (reducible <= std::max(cfg.rel_tol * std::abs(out.value), cfg.abs_tol) && std::isfinite(out.value))
                   ? QuadStatus::converged
                   : QuadStatus::non_convergence;
  return out;
}

template <class F>
QuadResult integrate(F&& f, double lo, double hi, const QuadratureConfig& cfg, double wavelength = 0.0) {
  const std::array<double, 2> pts{lo, hi};
  return integrate(f, std::span<const double>(pts), cfg, wavelength);
}

// Upper bound |f(x)| <= constant * x^exponent beyond some point.
struct PowerDecay {
  double constant = 1.0;
  double exponent = -2.0;
};

// Smallest X with the analytic tail bound int_X^inf C x^e dx <= target.
inline double tail_truncation_point(const PowerDecay& d, double target) {
  if (!(d.exponent < -1.0)) throw lab_error(errc::no_decay, "tail exponent must be < -1");
  if (!(target > 0.0) || !(d.constant > 0.0)) throw lab_error(errc::domain, "tail target and constant must be positive");
  const double s = -d.exponent - 1.0;
  return std::pow(d.constant / (s * target), 1.0 / s);
}

namespace detail {

// Cutoffs X, 2X, 4X aligned to whole wavelengths share the phase of the
// oscillatory tail, so the three partial values follow a single power rate.
template <class F>
QuadResult richardson_cutoff(F& f, double lo, double x, const QuadratureConfig& cfg, double wavelength) {
  if (wavelength > 0.0) x = lo + std::ceil((x - lo) / wavelength) * wavelength;
  QuadResult r1 = integrate(f, lo, x, cfg, wavelength);
  QuadResult d1 = integrate(f, x, lo + 2.0 * (x - lo), cfg, wavelength);
  QuadResult d2 = integrate(f, lo + 2.0 * (x - lo), lo + 4.0 * (x - lo), cfg, wavelength);
  QuadResult out = r1;
  out += d1;
  out += d2;
  const double rho = (d1.value != 0.0) ? d2.value / d1.value : 0.0;
  if (rho > 0.0 && rho < 0.95) {
    const double extra = d2.value * rho / (1.0 - rho);
    out.value += extra;
    out.error += 0.1 * std::abs(extra);
  } else {
    out.error += std::abs(d2.value);
  }
  if (out.error > std::max(cfg.rel_tol * std::abs(out.value), cfg.abs_tol) && out.converged())
    out.status = QuadStatus::non_convergence;
  return out;
}

}  // namespace detail

// int_lo^inf f. TailBound needs a decay bound with exponent < -1 (else NoDecay);
// FixedCutoff integrates to X, 2X, 4X and extrapolates.
template <class F>
QuadResult integrate_to_infinity(F&& f, double lo, const QuadratureConfig& cfg,
                                 std::optional<PowerDecay> decay = std::nullopt, double wavelength = 0.0) {
  if (const auto* fc = std::get_if<FixedCutoff>(&cfg.truncation))
    return detail::richardson_cutoff(f, lo, std::max(fc->x, lo + 1.0), cfg, wavelength);
  if (!decay) throw lab_error(errc::no_decay, "TailBound truncation needs a decay bound");
  const double scale = std::max({1.0, lo, wavelength});
  const double x0 = lo + scale;
  QuadResult head = integrate(f, lo, x0, cfg, wavelength);
  const double target = 0.5 * std::max(cfg.abs_tol, cfg.rel_tol * std::abs(head.value));
  double x = std::max(x0, tail_truncation_point(*decay, target));
  const double budget_panels = 2e5;
  if (wavelength > 0.0 && (x - x0) / (0.5 * wavelength) > budget_panels) {
    // Bound-driven cutoff too far for panel budget; extrapolate instead.
    return detail::richardson_cutoff(f, lo, lo + 2000.0 * std::max(wavelength, scale), cfg, wavelength);
  }
  if (x > x0) head += integrate(f, x0, x, cfg, wavelength);
  head.error += target;
  return head;
}

namespace detail {

// Integral over one decade [a, 10a], computed in the variable t = log x.
template <class G>
QuadResult decade(G& g, double a, const QuadratureConfig& cfg) {
  auto h = [&](double t) {
    const double x = std::exp(t);
    return g(x) * x;
  };
  const double la = std::log(a);
  return integrate(h, la, la + std::log(10.0), cfg);
}

// Extends an improper end by decades starting at anchor, moving toward 0
// (down = true) or infinity. Increments D_k of a nonnegative power-like
// integrand shrink geometrically when the end converges; the remaining tail
// is closed by the geometric series of the last ratio.
template <class G>
QuadResult improper_end(G& g, double anchor, bool down, double scale, const QuadratureConfig& cfg) {
  constexpr int max_decades = 60;
  // Increments shrinking by less than this per decade count as not shrinking.
  const double shrink = std::pow(10.0, -0.02);
  const double step = down ? 0.1 : 10.0;
  const QuadratureConfig inner{std::max(cfg.rel_tol, 1e-12), cfg.abs_tol * 1e-6, cfg.max_panels, cfg.truncation};
  // Asymptotic regime starts 3 decades past both the anchor and the scale.
  const double far = down ? std::min(anchor, scale) * 1e-3 : std::max(anchor, scale) * 1e3;

  QuadResult out;
  std::vector<double> inc;
  std::vector<double> partial;
  double a = anchor;
  int growth_streak = 0;
  int flat_streak = 0;
  for (int k = 0; k < max_decades; ++k) {
    const double lo = down ? a * step : a;
    QuadResult d = decade(g, lo, inner);
    if (!std::isfinite(d.value)) {
      out.status = QuadStatus::divergent;
      out.site = down ? DivergenceSite::at_zero : DivergenceSite::at_infinity;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out += d;
    inc.push_back(std::abs(d.value));
    partial.push_back(std::abs(out.value));
    a *= step;
    const bool asymptotic = down ? (a <= far) : (a >= far);
    const std::size_t n = inc.size();
    if (asymptotic && n >= 3 && inc[n - 1] == 0.0 && inc[n - 2] == 0.0) return out;
    if (n >= 2 && asymptotic) {
      const double prev_p = partial[n - 2];
      growth_streak = (prev_p > 0.0 && partial[n - 1] > 1.5 * prev_p) ? growth_streak + 1 : 0;
      const double prev_d = inc[n - 2];
      flat_streak = (prev_d > 0.0 && inc[n - 1] > shrink * prev_d) ? flat_streak + 1 : 0;
      if (growth_streak >= 3 || flat_streak >= 3) {
        out.status = QuadStatus::divergent;
        out.site = down ? DivergenceSite::at_zero : DivergenceSite::at_infinity;
        out.value = std::numeric_limits<double>::infinity();
        return out;
      }
      if (n >= 3 && inc[n - 2] > 0.0 && inc[n - 1] <= shrink * inc[n - 2]) {
        const double rho = inc[n - 1] / inc[n - 2];
        const double rho_prev = inc[n - 3] > 0.0 ? inc[n - 2] / inc[n - 3] : rho;
        const double tail = d.value * rho / (1.0 - rho);
        const bool stable = std::abs(rho - rho_prev) <= 1e-6 * std::max(rho, 1e-300) + 1e-12;
        if (inc[n - 1] == 0.0 || std::abs(tail) <= cfg.rel_tol * std::abs(out.value) || (stable && rho < 1.0)) {
          if (inc[n - 1] != 0.0) {
            out.value += tail;
            out.error += std::abs(tail) * (stable ? 1e-9 : 1.0) + std::abs(rho - rho_prev) * std::abs(tail);
          }
          return out;
        }
      }
    }
  }
  if (out.converged()) out.status = QuadStatus::non_convergence;
  return out;
}

}  // namespace detail

// int_lo^hi g for nonnegative power-like g, where lo may be 0 and hi may be
// infinite. Improper ends are Divergent when over three consecutive decade
// extensions the partial value grows by more than 1.5x or the decade
// increments stop shrinking.
template <class G>
QuadResult integrate_improper(G&& g, double lo, double hi, const QuadratureConfig& cfg,
                              std::span<const double> breaks = {}) {
  QuadResult out;
  if (!(hi > lo)) return out;
  const bool zero_end = (lo == 0.0);
  const bool inf_end = std::isinf(hi);
  double a = zero_end ? std::numeric_limits<double>::quiet_NaN() : lo;
  double b = inf_end ? std::numeric_limits<double>::quiet_NaN() : hi;
  // Choose a finite core [a, b] containing the breakpoints.
  std::vector<double> pts;
  for (double x : breaks)
    if (x > lo && x < hi && std::isfinite(x)) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  if (zero_end) a = pts.empty() ? (inf_end ? 1.0 : hi) : pts.front();
  if (inf_end) b = pts.empty() ? std::max(a, 1.0) : std::max(pts.back(), a);
  if (zero_end && inf_end && !(b > a)) b = a;
  if (b > a) {
    std::vector<double> core{a};
    for (double x : pts)
      if (x > a && x < b) core.push_back(x);
    core.push_back(b);
    // Split the core into decades so that every panel stays power-like.
    std::vector<double> mesh{core.front()};
    for (std::size_t i = 1; i < core.size(); ++i) {
      double x = mesh.back();
      while (core[i] > 10.0 * x) {
        x *= 10.0;
        mesh.push_back(x);
      }
      mesh.push_back(core[i]);
    }
    out += integrate(g, std::span<const double>(mesh), cfg);
  }
  if (zero_end) out += detail::improper_end(g, a, true, 1.0, cfg);
  if (out.divergent()) return out;
  if (inf_end) out += detail::improper_end(g, b, false, 1.0, cfg);
  return out;
}

// Weighted norm ||f||_{p,v} over a domain; p = inf gives sup v |f| on a
// refined log grid.
template <class W>
struct NormSpec {
  double p = 2.0;
  W weight;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

template <class F, class W>
QuadResult weighted_lp_norm(F&& f, const NormSpec<W>& spec, const QuadratureConfig& cfg,
                            std::span<const double> breaks = {}) {
  if (!(spec.p > 1.0)) throw lab_error(errc::domain, "norm exponent must be > 1 or infinite");
  if (std::isinf(spec.p)) {
    QuadResult out;
    const double lo = spec.lo > 0.0 ? spec.lo : 1e-12;
    const double hi = std::isfinite(spec.hi) ? spec.hi : 1e12;
    double best = 0.0;
    for (int n = 200; n <= 3200; n *= 2) {
      double s = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double x = lo * std::pow(hi / lo, static_cast<double>(i) / n);
        s = std::max(s, spec.weight(x) * std::abs(f(x)));
      }
      out.error = std::abs(s - best);
      best = s;
    }
    out.value = best;
    return out;
  }
  auto g = [&](double x) { return spec.weight(x) * std::pow(std::abs(f(x)), spec.p); };
  QuadResult r = integrate_improper(g, spec.lo, spec.hi, cfg, breaks);
  if (r.divergent()) return r;
  const double v = std::pow(std::max(r.value, 0.0), 1.0 / spec.p);
  r.error = (r.value > 0.0) ? v * r.error / (spec.p * r.value) : 0.0;
  r.value = v;
  return r;
}

}  // namespace pittlab
