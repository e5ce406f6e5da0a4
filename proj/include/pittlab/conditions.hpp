#pragma once

// Weight conditions as supremum scans over r, and closed-form beta ranges.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pittlab/error.hpp"
#include "pittlab/kernels.hpp"
#include "pittlab/quadrature.hpp"
#include "pittlab/transforms.hpp"
#include "pittlab/weights.hpp"

namespace pittlab {

// Verdicts closer than this to an analytic endpoint are Indeterminate.
inline constexpr double endpoint_epsilon = 0.05;

enum class Verdict { Finite, Divergent };
enum class ConditionSite { r_to_zero, r_to_infinity, inner_integral };

inline const char* to_string(Verdict v) { return v == Verdict::Finite ? "Finite" : "Divergent"; }
inline const char* to_string(ConditionSite s) {
  switch (s) {
    case ConditionSite::r_to_zero: return "r->0";
    case ConditionSite::r_to_infinity: return "r->inf";
    case ConditionSite::inner_integral: return "inner-integral";
  }
  return "";
}

struct ConditionReport {
  std::string name;
  double sup_value = 0.0;  // +inf when Divergent
  double argmax_r = 1.0;
  Verdict verdict = Verdict::Finite;
  std::optional<ConditionSite> divergence_site;
  std::vector<std::pair<double, double>> scan_trace;
  double refinement_drift = 0.0;  // relative gain of the refined sup over the grid sup
  bool experimental = false;

  bool finite() const { return verdict == Verdict::Finite; }
};

inline void to_json(nlohmann::json& j, const ConditionReport& r) {
  j = nlohmann::json{{"name", r.name},
                     {"verdict", to_string(r.verdict)},
                     {"argmax_r", r.argmax_r},
                     {"refinement_drift", r.refinement_drift},
                     {"experimental", r.experimental}};
  if (std::isfinite(r.sup_value)) j["sup_value"] = r.sup_value;
  else j["sup_value"] = "inf";
  j["divergence_site"] = r.divergence_site ? nlohmann::json(to_string(*r.divergence_site)) : nlohmann::json(nullptr);
  auto trace = nlohmann::json::array();
  for (const auto& [r_, v] : r.scan_trace) trace.push_back({r_, std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf")});
  j["scan_trace"] = std::move(trace);
}

struct ScanConfig {
  double r_lo = 1e-6;
  double r_hi = 1e6;
  int points = 60;
  int golden_steps = 20;
  double slope_tol = 0.01;  // |d log P / d log r| at a grid end above this means unbounded
  QuadratureConfig quad{1e-10, 1e-300};
};

namespace detail {

// Running integrals of a nonnegative weight at the nodes of an ascending grid:
// from_zero[i] = int_0^{x_i} g, to_infinity[i] = int_{x_i}^inf g.
struct Cumulative {
  std::vector<double> values;
  bool divergent = false;
};

template <class G>
Cumulative cumulative_from_zero(const G& g, const std::vector<double>& xs, const QuadratureConfig& cfg) {
  Cumulative out;
  const double one[1] = {1.0};
  QuadResult r = integrate_improper(g, 0.0, xs.front(), cfg, one);
  if (r.divergent()) return {{}, true};
  double acc = r.value;
  out.values.push_back(acc);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    acc += integrate_improper(g, xs[i - 1], xs[i], cfg, one).value;
    out.values.push_back(acc);
  }
  return out;
}

template <class G>
Cumulative cumulative_to_infinity(const G& g, const std::vector<double>& xs, const QuadratureConfig& cfg) {
  Cumulative out;
  const double one[1] = {1.0};
  QuadResult r = integrate_improper(g, xs.back(), std::numeric_limits<double>::infinity(), cfg, one);
  if (r.divergent()) return {{}, true};
  out.values.assign(xs.size(), 0.0);
  double acc = r.value;
  out.values.back() = acc;
  for (std::size_t i = xs.size() - 1; i-- > 0;) {
    acc += integrate_improper(g, xs[i], xs[i + 1], cfg, one).value;
    out.values[i] = acc;
  }
  return out;
}

// Generic sup scan: log_product(i) gives log P(r_i) on the grid and
// log_at(r) gives it anywhere, for golden-section refinement.
template <class OnGrid, class Anywhere>
ConditionReport sup_scan(std::string name, const std::vector<double>& rs, OnGrid log_product, Anywhere log_at,
                         const ScanConfig& cfg) {
  ConditionReport rep;
  rep.name = std::move(name);
  std::vector<double> lp(rs.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    lp[i] = log_product(i);
    rep.scan_trace.emplace_back(rs[i], std::exp(lp[i]));
    if (lp[i] > lp[best]) best = i;
  }
  // End slopes over roughly one decade.
  const std::size_t w = std::max<std::size_t>(2, rs.size() / 12);
  const double lo_slope = (lp[w] - lp[0]) / std::log(rs[w] / rs[0]);
  const std::size_t n = rs.size() - 1;
  const double hi_slope = (lp[n] - lp[n - w]) / std::log(rs[n] / rs[n - w]);
  if (lo_slope < -cfg.slope_tol || hi_slope > cfg.slope_tol) {
    rep.verdict = Verdict::Divergent;
    rep.divergence_site = lo_slope < -cfg.slope_tol ? ConditionSite::r_to_zero : ConditionSite::r_to_infinity;
    rep.sup_value = std::numeric_limits<double>::infinity();
    rep.argmax_r = lo_slope < -cfg.slope_tol ? rs.front() : rs.back();
    return rep;
  }
  // Golden-section search on log r in the bracket around the grid argmax.
  double a = std::log(rs[best == 0 ? 0 : best - 1]);
  double b = std::log(rs[std::min(best + 1, n)]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = log_at(std::exp(c));
  double fd = log_at(std::exp(d));
  for (int k = 0; k < cfg.golden_steps; ++k) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = log_at(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = log_at(std::exp(d));
    }
  }
  const double refined = std::max(fc, fd);
  const double top = std::max(refined, lp[best]);
  rep.sup_value = std::exp(top);
  rep.argmax_r = refined > lp[best] ? std::exp(fc > fd ? c : d) : rs[best];
  rep.refinement_drift = std::exp(top - lp[best]) - 1.0;
  return rep;
}

inline ConditionReport divergent_inner(std::string name) {
  ConditionReport rep;
  rep.name = std::move(name);
  rep.verdict = Verdict::Divergent;
  rep.divergence_site = ConditionSite::inner_integral;
  rep.sup_value = std::numeric_limits<double>::infinity();
  return rep;
}

inline std::vector<double> scan_grid(const ScanConfig& cfg) { return log_grid(cfg.r_lo, cfg.r_hi, cfg.points); }

inline std::vector<double> reciprocal(const std::vector<double>& rs) {
  std::vector<double> ys;
  for (auto it = rs.rbegin(); it != rs.rend(); ++it) ys.push_back(1.0 / *it);
  return ys;
}

// Integral of g from the nearest grid node to x, added to the node value.
template <class G>
double extend_from_node(const G& g, const std::vector<double>& xs, const std::vector<double>& vals, double x,
                        bool from_zero, const QuadratureConfig& cfg) {
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i == xs.size()) i = xs.size() - 1;
  if (i > 0 && std::abs(std::log(xs[i - 1] / x)) < std::abs(std::log(xs[i] / x))) --i;
  const double one[1] = {1.0};
  const double lo = std::min(xs[i], x);
  const double hi = std::max(xs[i], x);
  const double piece = hi > lo ? integrate_improper(g, lo, hi, cfg, one).value : 0.0;
  const bool add = (x > xs[i]) == from_zero;
  return add ? vals[i] + piece : vals[i] - piece;
}

}  // namespace detail

// The two supremum conditions:
//   sup_r (int_0^{1/r} u w^{q/a'})^{1/q} (int_0^r v^{1-p'} s^{p'/a'})^{1/p'}
//   sup_r (int_{1/r}^inf u w^{q(1/a'-1/2)})^{1/q} (int_r^inf v^{1-p'} s^{p'(1/a'-1/2)})^{1/p'}
inline std::pair<ConditionReport, ConditionReport> hardy_pair_condition(const Weight& u, const Weight& v,
                                                                        const Weight& s, const Weight& w,
                                                                        const ExponentSet& e,
                                                                        const ScanConfig& cfg = {}) {
  e.validate();
  const double q = e.q;
  const double pd = e.p_dual();
  const double ia = e.inv_a_dual();
  const auto rs = detail::scan_grid(cfg);
  const auto ys = detail::reciprocal(rs);
  const std::size_t n = rs.size();

  auto U1 = [&](double y) { return u(y) * std::pow(w(y), q * ia); };
  auto V1 = [&](double x) { return std::pow(v(x), 1.0 - pd) * std::pow(s(x), pd * ia); };
  auto U2 = [&](double y) { return u(y) * std::pow(w(y), q * (ia - 0.5)); };
  auto V2 = [&](double x) { return std::pow(v(x), 1.0 - pd) * std::pow(s(x), pd * (ia - 0.5)); };

  std::pair<ConditionReport, ConditionReport> out;
  {
    const auto A = detail::cumulative_from_zero(U1, ys, cfg.quad);
    const auto B = detail::cumulative_from_zero(V1, rs, cfg.quad);
    if (A.divergent || B.divergent) {
      out.first = detail::divergent_inner("hardy_first");
    } else {
      auto on_grid = [&](std::size_t i) { return std::log(A.values[n - 1 - i]) / q + std::log(B.values[i]) / pd; };
      auto anywhere = [&](double r) {
        const double a = detail::extend_from_node(U1, ys, A.values, 1.0 / r, true, cfg.quad);
        const double b = detail::extend_from_node(V1, rs, B.values, r, true, cfg.quad);
        return std::log(a) / q + std::log(b) / pd;
      };
      out.first = detail::sup_scan("hardy_first", rs, on_grid, anywhere, cfg);
    }
  }
  {
    const auto A = detail::cumulative_to_infinity(U2, ys, cfg.quad);
    const auto B = detail::cumulative_to_infinity(V2, rs, cfg.quad);
    if (A.divergent || B.divergent) {
      out.second = detail::divergent_inner("hardy_second");
    } else {
      auto on_grid = [&](std::size_t i) { return std::log(A.values[n - 1 - i]) / q + std::log(B.values[i]) / pd; };
      auto anywhere = [&](double r) {
        const double a = detail::extend_from_node(U2, ys, A.values, 1.0 / r, false, cfg.quad);
        const double b = detail::extend_from_node(V2, rs, B.values, r, false, cfg.quad);
        return std::log(a) / q + std::log(b) / pd;
      };
      out.second = detail::sup_scan("hardy_second", rs, on_grid, anywhere, cfg);
    }
  }
  return out;
}

// s(x) w(1/x) within [1/3, 3] on the scan grid.
inline bool duality_holds(const Weight& s, const Weight& w, const ScanConfig& cfg = {}) {
  for (double x : detail::scan_grid(cfg)) {
    const double d = s(x) * w(1.0 / x);
    if (!(d >= 1.0 / 3.0 && d <= 3.0)) return false;
  }
  return true;
}

// Single glued condition for a = 1:
//   sup_r (int_0^r v^{1-p'} + s(r)^{p'/2} int_r^inf v^{1-p'} s^{-p'/2})^{1/p'}
//       * (w(1/r)^{q/2} int_{1/r}^inf u w^{-q/2} + int_0^{1/r} u)^{1/q}
inline ConditionReport glued_condition(const Weight& u, const Weight& v, const Weight& s, const Weight& w,
                                       const ExponentSet& e, const ScanConfig& cfg = {}) {
  e.validate();
  if (e.a != 1.0) throw lab_error(errc::config, "glued condition needs a = 1");
  if (!duality_holds(s, w, cfg)) throw lab_error(errc::inverse_relation_violated, "s(x) w(1/x) is not comparable to 1");
  const double q = e.q;
  const double pd = e.p_dual();
  const auto rs = detail::scan_grid(cfg);
  const auto ys = detail::reciprocal(rs);
  const std::size_t n = rs.size();

  auto V1 = [&](double x) { return std::pow(v(x), 1.0 - pd); };
  auto V2 = [&](double x) { return std::pow(v(x), 1.0 - pd) * std::pow(s(x), -0.5 * pd); };
  auto U1 = [&](double y) { return u(y); };
  auto U2 = [&](double y) { return u(y) * std::pow(w(y), -0.5 * q); };

  const auto B1 = detail::cumulative_from_zero(V1, rs, cfg.quad);
  const auto B2 = detail::cumulative_to_infinity(V2, rs, cfg.quad);
  const auto A1 = detail::cumulative_from_zero(U1, ys, cfg.quad);
  const auto A2 = detail::cumulative_to_infinity(U2, ys, cfg.quad);
  if (B1.divergent || B2.divergent || A1.divergent || A2.divergent) return detail::divergent_inner("glued");

  auto combine = [&](double r, double b1, double b2, double a1, double a2) {
    const double left = b1 + std::pow(s(r), 0.5 * pd) * b2;
    const double right = std::pow(w(1.0 / r), 0.5 * q) * a2 + a1;
    return std::log(left) / pd + std::log(right) / q;
  };
  auto on_grid = [&](std::size_t i) {
    return combine(rs[i], B1.values[i], B2.values[i], A1.values[n - 1 - i], A2.values[n - 1 - i]);
  };
  auto anywhere = [&](double r) {
    return combine(r, detail::extend_from_node(V1, rs, B1.values, r, true, cfg.quad),
                   detail::extend_from_node(V2, rs, B2.values, r, false, cfg.quad),
                   detail::extend_from_node(U1, ys, A1.values, 1.0 / r, true, cfg.quad),
                   detail::extend_from_node(U2, ys, A2.values, 1.0 / r, false, cfg.quad));
  };
  return detail::sup_scan("glued", rs, on_grid, anywhere, cfg);
}

// sup_r (int_0^{1/r} u)^{1/q} (int_0^r v)^{-1/p} (int_0^r s)
inline ConditionReport lorentz_necessity_condition(const Weight& u, const Weight& v, const Weight& s,
                                                   const ExponentSet& e, const ScanConfig& cfg = {}) {
  e.validate();
  const auto rs = detail::scan_grid(cfg);
  const auto ys = detail::reciprocal(rs);
  const std::size_t n = rs.size();
  auto U = [&](double y) { return u(y); };
  auto V = [&](double x) { return v(x); };
  auto S = [&](double x) { return s(x); };
  const auto A = detail::cumulative_from_zero(U, ys, cfg.quad);
  const auto B = detail::cumulative_from_zero(V, rs, cfg.quad);
  const auto C = detail::cumulative_from_zero(S, rs, cfg.quad);
  if (A.divergent || B.divergent || C.divergent) return detail::divergent_inner("lorentz_necessity");
  auto on_grid = [&](std::size_t i) {
    return std::log(A.values[n - 1 - i]) / e.q - std::log(B.values[i]) / e.p + std::log(C.values[i]);
  };
  auto anywhere = [&](double r) {
    return std::log(detail::extend_from_node(U, ys, A.values, 1.0 / r, true, cfg.quad)) / e.q -
           std::log(detail::extend_from_node(V, rs, B.values, r, true, cfg.quad)) / e.p +
           std::log(detail::extend_from_node(S, rs, C.values, r, true, cfg.quad));
  };
  return detail::sup_scan("lorentz_necessity", rs, on_grid, anywhere, cfg);
}

// Single condition sup_r (int_0^{1/r} u)(int_0^r v^{-1}) for (p, q, a) = (2, 2, 2),
// evaluated on u, v directly rather than on their rearrangements.
inline ConditionReport single_condition_222(const Weight& u, const Weight& v, const ScanConfig& cfg = {}) {
  const auto rs = detail::scan_grid(cfg);
  const auto ys = detail::reciprocal(rs);
  const std::size_t n = rs.size();
  auto U = [&](double y) { return u(y); };
  auto V = [&](double x) { return 1.0 / v(x); };
  const auto A = detail::cumulative_from_zero(U, ys, cfg.quad);
  const auto B = detail::cumulative_from_zero(V, rs, cfg.quad);
  ConditionReport rep;
  if (A.divergent || B.divergent) {
    rep = detail::divergent_inner("single_222");
  } else {
    auto on_grid = [&](std::size_t i) { return std::log(A.values[n - 1 - i]) + std::log(B.values[i]); };
    auto anywhere = [&](double r) {
      return std::log(detail::extend_from_node(U, ys, A.values, 1.0 / r, true, cfg.quad)) +
             std::log(detail::extend_from_node(V, rs, B.values, r, true, cfg.quad));
    };
    rep = detail::sup_scan("single_222", rs, on_grid, anywhere, cfg);
  }
  rep.experimental = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-form ranges

struct Endpoint {
  double value = 0.0;
  bool closed = false;
};

enum class RangeStatus { Satisfied, Violated, Indeterminate };

inline const char* to_string(RangeStatus s) {
  switch (s) {
    case RangeStatus::Satisfied: return "Satisfied";
    case RangeStatus::Violated: return "Violated";
    case RangeStatus::Indeterminate: return "Indeterminate";
  }
  return "";
}

struct RangeQuery {
  double beta = 0.0;
  double gamma = 0.0;
};

// beta_required = gamma + beta_offset.
struct RangeVerdict {
  std::string label;
  double beta_offset = 0.0;
  std::optional<double> beta_required;
  Endpoint lo;
  Endpoint hi;
  std::vector<double> excluded_points;
  bool sharp = false;
  bool satisfied = false;
  std::optional<RangeStatus> status;

  bool contains(double beta) const {
    const bool above = lo.closed ? beta >= lo.value : beta > lo.value;
    const bool below = hi.closed ? beta <= hi.value : beta < hi.value;
    if (!above || !below) return false;
    for (double x : excluded_points)
      if (beta == x) return false;
    return true;
  }

  double endpoint_distance(double beta) const {
    double d = std::min(std::abs(beta - lo.value), std::abs(beta - hi.value));
    for (double x : excluded_points) d = std::min(d, std::abs(beta - x));
    return d;
  }

  RangeVerdict& query(const RangeQuery& qy) {
    beta_required = qy.gamma + beta_offset;
    const bool relation = std::abs(qy.beta - *beta_required) <= 1e-9 * std::max(1.0, std::abs(qy.beta));
    satisfied = relation && contains(qy.beta);
    if (!relation) status = RangeStatus::Violated;
    else if (endpoint_distance(qy.beta) < endpoint_epsilon) status = RangeStatus::Indeterminate;
    else status = satisfied ? RangeStatus::Satisfied : RangeStatus::Violated;
    return *this;
  }
};

inline void to_json(nlohmann::json& j, const Endpoint& e) { j = nlohmann::json{{"value", e.value}, {"closed", e.closed}}; }

inline void to_json(nlohmann::json& j, const RangeVerdict& r) {
  j = nlohmann::json{{"label", r.label},
                     {"beta_offset", r.beta_offset},
                     {"beta_interval", {{"lo", r.lo}, {"hi", r.hi}}},
                     {"excluded_points", r.excluded_points},
                     {"sharp", r.sharp},
                     {"satisfied", r.satisfied}};
  j["beta_required"] = r.beta_required ? nlohmann::json(*r.beta_required) : nlohmann::json(nullptr);
  j["status"] = r.status ? nlohmann::json(to_string(*r.status)) : nlohmann::json(nullptr);
}

struct PittRanges {
  RangeVerdict sufficient;
  std::optional<RangeVerdict> sharp;
};

namespace detail {

inline double scaling_offset(const TransformSpec& t, const ExponentSet& e) {
  const auto& env = t.envelope();
  return t.c0 - t.b0 + env.c1 - env.b1 + 1.0 / e.q - 1.0 / e.p_dual();
}

inline void finish(RangeVerdict& r, const std::optional<RangeQuery>& qy) {
  if (qy) r.query(*qy);
}

}  // namespace detail

// Sufficient range 1/q + c0 + c2 < beta < 1/q + c0 + c1 for a strict envelope,
// plus the known sharp ranges for Hankel and sine.
inline PittRanges power_pitt_range(const TransformSpec& t, const ExponentSet& e,
                                   std::optional<RangeQuery> qy = std::nullopt) {
  e.validate();
  const auto& env = t.envelope();
  if (!env.strict()) throw lab_error(errc::envelope_not_strict, t.label() + " envelope needs b1 - b2 = c1 - c2 > 0");
  PittRanges out;
  auto& s = out.sufficient;
  s.label = t.label() + " sufficient";
  s.beta_offset = detail::scaling_offset(t, e);
  s.lo = {1.0 / e.q + t.c0 + env.c2, false};
  s.hi = {1.0 / e.q + t.c0 + env.c1, false};
  const double floor = std::max(1.0 / e.q - 1.0 / e.p_dual(), 0.0);
  if (t.name == TransformName::Hankel) {
    RangeVerdict sh = s;
    sh.label = t.label() + " sharp";
    sh.lo = {floor - t.param - 0.5, true};
    sh.sharp = true;
    out.sharp = sh;
  } else if (t.name == TransformName::Sine) {
    RangeVerdict sh = s;
    sh.label = t.label() + " sharp";
    sh.lo = {floor, true};
    sh.sharp = true;
    out.sharp = sh;
  } else if (t.name == TransformName::ScriptH && t.param > 0.5) {
    s.sharp = true;
  }
  detail::finish(out.sufficient, qy);
  if (out.sharp) detail::finish(*out.sharp, qy);
  return out;
}

// Range for general monotone f: 1/q + c0 + c < beta < 1/q + c0 + c1.
inline RangeVerdict gm_power_range(const TransformSpec& t, const ExponentSet& e,
                                   std::optional<RangeQuery> qy = std::nullopt) {
  e.validate();
  if (!t.primitive) throw lab_error(errc::missing_primitive_bound, t.label() + " has no primitive bound");
  const auto& pb = *t.primitive;
  const auto& env = t.envelope();
  if (!(pb.b >= 0.0) || !(pb.c < env.c1))
    throw lab_error(errc::missing_primitive_bound, t.label() + " primitive bound needs b >= 0 and c < c1");
  RangeVerdict r;
  r.label = t.label() + " gm";
  r.beta_offset = detail::scaling_offset(t, e);
  r.lo = {1.0 / e.q + t.c0 + pb.c, false};
  r.hi = {1.0 / e.q + t.c0 + env.c1, false};
  r.sharp = t.name == TransformName::ScriptH;
  detail::finish(r, qy);
  return r;
}

// With the first n moments vanishing: 1/q + c0 + c1 < beta < 1/q + c0 + c1 + nk,
// excluding the interior lattice 1/q + c0 + c1 + jk.
inline RangeVerdict vanishing_moment_range(const TransformSpec& t, int n, const ExponentSet& e,
                                           std::optional<RangeQuery> qy = std::nullopt) {
  e.validate();
  if (n < 1) throw lab_error(errc::domain, "moment count must be >= 1");
  const auto series = t.kernel.series();
  if (!series) throw lab_error(errc::no_series_kernel, t.label() + " kernel has no power series");
  const double base = 1.0 / e.q + t.c0 + t.envelope().c1;
  RangeVerdict r;
  r.label = t.label() + " vanishing moments n=" + std::to_string(n);
  r.beta_offset = detail::scaling_offset(t, e);
  r.lo = {base, false};
  r.hi = {base + n * series->k, false};
  for (int j = 1; j < n; ++j) r.excluded_points.push_back(base + j * series->k);
  detail::finish(r, qy);
  return r;
}

// Piecewise powers u = x^{-beta' q}, v = x^{gamma p}, s = x^delta:
// beta_i = gamma_i + 1/q - 1/p' and 1/q - delta/2 < beta_i < 1/q for i = 1, 2.
inline RangeVerdict piecewise_power_range(double delta, const ExponentSet& e, std::pair<double, double> beta_bar,
                                          std::pair<double, double> gamma_bar) {
  e.validate();
  if (std::abs((beta_bar.first - gamma_bar.first) - (beta_bar.second - gamma_bar.second)) > 1e-12)
    throw lab_error(errc::config, "piecewise exponents need beta1 - gamma1 = beta2 - gamma2");
  RangeVerdict r;
  r.label = "piecewise power delta=" + std::to_string(delta);
  r.beta_offset = 1.0 / e.q - 1.0 / e.p_dual();
  r.lo = {1.0 / e.q - 0.5 * delta, false};
  r.hi = {1.0 / e.q, false};
  RangeVerdict first = r;
  RangeVerdict second = r;
  first.query({beta_bar.first, gamma_bar.first});
  second.query({beta_bar.second, gamma_bar.second});
  r.beta_required = first.beta_required;
  r.satisfied = first.satisfied && second.satisfied;
  if (*first.status == RangeStatus::Violated || *second.status == RangeStatus::Violated) r.status = RangeStatus::Violated;
  else if (*first.status == RangeStatus::Indeterminate || *second.status == RangeStatus::Indeterminate)
    r.status = RangeStatus::Indeterminate;
  else r.status = RangeStatus::Satisfied;
  return r;
}

// Weights of the reduced Fourier-type problem behind the power-kernel range:
// u = y^{-(beta - c0 - c1) q}, v = x^{(gamma - b0 - b1) p}, s = w = x^{2(c1 - c2)}.
struct WeightQuad {
  Weight u;
  Weight v;
  Weight s;
  Weight w;
};

inline WeightQuad reduced_power_weights(const TransformSpec& t, const ExponentSet& e, double beta, double gamma) {
  const auto& env = t.envelope();
  if (!env.strict()) throw lab_error(errc::envelope_not_strict, t.label() + " envelope needs b1 - b2 = c1 - c2 > 0");
  const double bp = beta - t.c0 - env.c1;
  const double gp = gamma - t.b0 - env.b1;
  const double delta = 2.0 * (env.c1 - env.c2);
  return {Weight::power(-bp * e.q), Weight::power(gp * e.p), Weight::power(delta), Weight::power(delta)};
}

// ---------------------------------------------------------------------------
// Oinarov triples t = N^a, u = N^b, v = N^{-(a+b)/2}

struct OinarovReport {
  std::vector<double> N;
  std::vector<double> required_d;  // max over (a, b) pairs
  std::vector<std::vector<double>> per_pair;  // [pair][N]
  double growth_exponent = 0.0;  // least-squares slope of log d against log N
  bool unbounded = false;
};

inline void to_json(nlohmann::json& j, const OinarovReport& r) {
  j = nlohmann::json{{"N", r.N},
                     {"required_d", r.required_d},
                     {"per_pair", r.per_pair},
                     {"growth_exponent", r.growth_exponent},
                     {"verdict", r.unbounded ? "Unbounded" : "Bounded"}};
}

// Smallest d with d^{-1}(K(t,u) + K(u,v)) <= K(t,v) <= d(K(t,u) + K(u,v)) on every triple.
inline OinarovReport oinarov_check(const KernelSpec& kernel, std::span<const double> N_grid,
                                   std::span<const std::pair<double, double>> alpha_beta) {
  OinarovReport rep;
  rep.per_pair.assign(alpha_beta.size(), {});
  for (double N : N_grid) {
    double worst = 0.0;
    for (std::size_t k = 0; k < alpha_beta.size(); ++k) {
      const auto [a, b] = alpha_beta[k];
      const double t = std::pow(N, a);
      const double u = std::pow(N, b);
      const double v = std::pow(N, -0.5 * (a + b));
      const double sum = std::abs(kernel(t, u)) + std::abs(kernel(u, v));
      const double direct = std::abs(kernel(t, v));
      double d = std::numeric_limits<double>::infinity();
      if (sum > 0.0 && direct > 0.0) d = std::max(sum / direct, direct / sum);
      rep.per_pair[k].push_back(d);
      worst = std::max(worst, d);
    }
    rep.N.push_back(N);
    rep.required_d.push_back(worst);
  }
  if (rep.N.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(rep.N.size());
    for (std::size_t i = 0; i < rep.N.size(); ++i) {
      const double x = std::log(rep.N[i]);
      const double y = std::log(rep.required_d[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.growth_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  bool increasing = true;
  for (std::size_t i = 1; i < rep.required_d.size(); ++i)
    if (!(rep.required_d[i] > rep.required_d[i - 1])) increasing = false;
  rep.unbounded = increasing && rep.growth_exponent > endpoint_epsilon;
  for (double d : rep.required_d)
    if (std::isinf(d)) rep.unbounded = true;
  return rep;
}

}  // namespace pittlab
