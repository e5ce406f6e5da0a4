#pragma once

// Experiment runner behind the command-line tool: config parsing, ratio
// probes, growth fits, condition bundles and report assembly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pittlab/conditions.hpp"
#include "pittlab/error.hpp"
#include "pittlab/kernels.hpp"
#include "pittlab/quadrature.hpp"
#include "pittlab/transforms.hpp"
#include "pittlab/weights.hpp"

namespace pittlab::lab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

// Weight exponents are given either in the power frame, ||y^-beta Ff||_q <~ ||x^gamma f||_p,
// or in the Fourier frame with s = w = x^{2(c1-c2)}, where beta_pow = beta + c0 + c1
// and gamma_pow = gamma + b0 + b1. Pairs are (beta1, beta2) and (gamma1, gamma2);
// u uses beta2 on y <= 1 and beta1 on y > 1, v uses gamma1 on x <= 1 and gamma2 on x > 1.
enum class Frame { power, fourier };

struct WeightsConfig {
  Frame frame = Frame::power;
  std::pair<double, double> beta{0.0, 0.0};
  std::pair<double, double> gamma{0.0, 0.0};
  bool piecewise = false;
  std::optional<std::pair<double, double>> u_window;  // u vanishes outside this y-interval
};

enum class FamilyKind { truncated_power, log_counterexample, zero };

struct FamilyConfig {
  FamilyKind kind = FamilyKind::truncated_power;
  double d = 0.0;  // f_r = x^{-b0-b1+d} on (0, r)
  std::vector<double> params;
};

enum class GrowthModel { log, loglog };

struct ExperimentConfig {
  std::string id = "experiment";
  std::string preset;
  double transform_param = 0.0;
  TransformSpec transform = sine_transform();
  ExponentSet exps;
  WeightsConfig weights;
  FamilyConfig family;
  QuadratureConfig quadrature{1e-8, 1e-300};
  GrowthModel growth = GrowthModel::log;
  double ry_cap = 200.0;  // transform norms are integrated explicitly up to y = cap / support_hi
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string output_path;
  std::string output_format = "csv";
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& field, const std::string& what) {
  throw lab_error(errc::config, "config field '" + field + "': " + what);
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) config_fail(path + key, "missing");
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) config_fail(path, "expected a number");
  return j.get<double>();
}

inline std::pair<double, double> scalar_or_pair(const json& j, const std::string& path, bool& piecewise) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    piecewise = true;
    return {j[0].get<double>(), j[1].get<double>()};
  }
  config_fail(path, "expected a number or a pair of numbers");
}

inline std::vector<double> parameter_grid(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  } else if (j.is_object()) {
    const double lo = number(require(j, "lo", path + "."), path + ".lo");
    const double hi = number(require(j, "hi", path + "."), path + ".hi");
    const json& nj = require(j, "n", path + ".");
    if (!nj.is_number_integer() || nj.get<int>() < 1) config_fail(path + ".n", "expected a positive integer");
    if (!(lo > 0.0) || !(hi >= lo)) config_fail(path, "need 0 < lo <= hi");
    out = nj.get<int>() == 1 ? std::vector<double>{lo} : log_grid(lo, hi, nj.get<int>());
  } else {
    config_fail(path, "expected a list or {lo, hi, n}");
  }
  if (out.empty()) config_fail(path, "parameter grid is empty");
  for (double x : out)
    if (!(x > 0.0)) config_fail(path, "parameters must be positive");
  return out;
}

inline TransformSpec make_preset(const std::string& name, double param) {
  if (name == "hankel") return hankel_transform(param);
  if (name == "scripth") return script_h_transform(param);
  if (name == "sine") return sine_transform();
  if (name == "cosine") return cosine_transform();
  if (name == "modelmin") return model_min_transform(param);
  config_fail("transform.preset", "unknown preset '" + name + "'");
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  using namespace detail;
  if (!j.is_object()) config_fail("", "top level must be an object");
  ExperimentConfig c;
  if (j.contains("id")) {
    if (!j["id"].is_string()) config_fail("id", "expected a string");
    c.id = j["id"].get<std::string>();
  }

  const json& t = require(j, "transform", "");
  const json& preset = require(t, "preset", "transform.");
  if (!preset.is_string()) config_fail("transform.preset", "expected a string");
  c.preset = preset.get<std::string>();
  if (c.preset == "hankel" || c.preset == "scripth") {
    c.transform_param = number(require(t, "alpha", "transform."), "transform.alpha");
  } else if (c.preset == "modelmin") {
    c.transform_param = number(require(t, "delta", "transform."), "transform.delta");
  }
  try {
    c.transform = make_preset(c.preset, c.transform_param);
  } catch (const lab_error& e) {
    if (e.code() == errc::config) throw;
    config_fail("transform", e.what());
  }

  const json& ex = require(j, "exps", "");
  c.exps.p = number(require(ex, "p", "exps."), "exps.p");
  c.exps.q = number(require(ex, "q", "exps."), "exps.q");
  if (ex.contains("a")) c.exps.a = ex["a"].is_string() && ex["a"] == "inf" ? std::numeric_limits<double>::infinity()
                                                                           : number(ex["a"], "exps.a");
  try {
    c.exps.validate();
  } catch (const lab_error& e) {
    config_fail("exps", e.what());
  }

  const json& w = require(j, "weights", "");
  if (w.contains("frame")) {
    const json& f = w["frame"];
    if (f == "power") c.weights.frame = Frame::power;
    else if (f == "fourier") c.weights.frame = Frame::fourier;
    else config_fail("weights.frame", "expected \"power\" or \"fourier\"");
  }
  bool pb = false;
  bool pg = false;
  c.weights.beta = scalar_or_pair(require(w, "beta", "weights."), "weights.beta", pb);
  c.weights.gamma = scalar_or_pair(require(w, "gamma", "weights."), "weights.gamma", pg);
  if (pb != pg) config_fail("weights", "beta and gamma must both be scalars or both be pairs");
  c.weights.piecewise = pb;
  if (pb) {
    const double d1 = c.weights.beta.first - c.weights.gamma.first;
    const double d2 = c.weights.beta.second - c.weights.gamma.second;
    if (std::abs(d1 - d2) > 1e-12) config_fail("weights", "piecewise exponents need beta1 - gamma1 = beta2 - gamma2");
  }
  if (w.contains("u_window")) {
    const json& uw = w["u_window"];
    if (!uw.is_array() || uw.size() != 2) config_fail("weights.u_window", "expected [lo, hi]");
    const double lo = number(uw[0], "weights.u_window[0]");
    const double hi = number(uw[1], "weights.u_window[1]");
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) config_fail("weights.u_window", "need 0 < lo < hi < inf");
    c.weights.u_window = std::make_pair(lo, hi);
  }

  const json& fam = require(j, "family", "");
  const json& kind = require(fam, "kind", "family.");
  if (kind == "truncated_power") {
    c.family.kind = FamilyKind::truncated_power;
    c.family.d = number(require(fam, "d", "family."), "family.d");
    c.family.params = parameter_grid(require(fam, "r", "family."), "family.r");
  } else if (kind == "log_counterexample") {
    c.family.kind = FamilyKind::log_counterexample;
    c.family.params = parameter_grid(require(fam, "N", "family."), "family.N");
    for (double n : c.family.params)
      if (n < 2.0 || n != std::floor(n)) config_fail("family.N", "N must be an integer >= 2");
  } else if (kind == "zero") {
    c.family.kind = FamilyKind::zero;
    c.family.params = parameter_grid(require(fam, "r", "family."), "family.r");
  } else {
    config_fail("family.kind", "expected truncated_power, log_counterexample or zero");
  }

  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    if (q.contains("rel_tol")) c.quadrature.rel_tol = number(q["rel_tol"], "quadrature.rel_tol");
    if (q.contains("abs_tol")) c.quadrature.abs_tol = number(q["abs_tol"], "quadrature.abs_tol");
    if (q.contains("max_panels")) c.quadrature.max_panels = static_cast<int>(number(q["max_panels"], "quadrature.max_panels"));
    if (q.contains("ry_cap")) c.ry_cap = number(q["ry_cap"], "quadrature.ry_cap");
    try {
      c.quadrature.validate();
    } catch (const lab_error& e) {
      config_fail("quadrature", e.what());
    }
    if (!(c.ry_cap >= 10.0)) config_fail("quadrature.ry_cap", "must be >= 10");
  }
  if (j.contains("probe")) {
    const json& g = require(j["probe"], "model", "probe.");
    if (g == "log") c.growth = GrowthModel::log;
    else if (g == "loglog") c.growth = GrowthModel::loglog;
    else config_fail("probe.model", "expected \"log\" or \"loglog\"");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) config_fail("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    if (o.contains("path")) c.output_path = o["path"].get<std::string>();
    if (o.contains("format")) {
      c.output_format = o["format"].get<std::string>();
      if (c.output_format != "csv" && c.output_format != "json") config_fail("output.format", "expected csv or json");
    }
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lab_error(errc::io, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw lab_error(errc::config, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Weights in the power frame

struct PowerFrameWeights {
  std::pair<double, double> beta;   // (beta1, beta2)
  std::pair<double, double> gamma;  // (gamma1, gamma2)

  double u(double y, double q) const { return std::pow(y, -q * (y <= 1.0 ? beta.second : beta.first)); }
  double v(double x, double p) const { return std::pow(x, p * (x <= 1.0 ? gamma.first : gamma.second)); }
};

inline PowerFrameWeights power_frame(const ExperimentConfig& c) {
  PowerFrameWeights w{c.weights.beta, c.weights.gamma};
  if (c.weights.frame == Frame::fourier) {
    const auto& t = c.transform;
    const double bs = t.c0 + t.envelope().c1;
    const double gs = t.b0 + t.envelope().b1;
    w.beta = {w.beta.first + bs, w.beta.second + bs};
    w.gamma = {w.gamma.first + gs, w.gamma.second + gs};
  }
  return w;
}

inline TestFunction family_member(const ExperimentConfig& c, double param) {
  const auto& t = c.transform;
  switch (c.family.kind) {
    case FamilyKind::truncated_power:
      return make_truncated_power(-t.b0 - t.envelope().b1 + c.family.d, param, Side::below);
    case FamilyKind::log_counterexample:
      return make_log_counterexample(static_cast<int>(param), t.b0 + t.envelope().b1);
    case FamilyKind::zero:
      return make_truncated_power(0.0, param, Side::below).scaled(0.0);
  }
  return make_truncated_power(0.0, param, Side::below);
}

// ---------------------------------------------------------------------------
// Norms

// (int u(y) |Ff(y)|^q dy)^{1/q}. Up to y = cap / support_hi the integrand is
// resolved panel by panel; the remainder comes from the ratio of the last two
// decade integrals, and the y -> 0 end from decade extension.
inline QuadResult transform_norm(const TransformSpec& t, const TestFunction& f, const PowerFrameWeights& w,
                                 double q, const std::optional<std::pair<double, double>>& window, double ry_cap,
                                 const QuadratureConfig& cfg) {
  QuadResult out;
  if (f.is_zero()) return out;
  QuadratureConfig inner = cfg;
  inner.rel_tol = std::min(cfg.rel_tol, 1e-9);
  auto h = [&](double y) {
    const double v = apply_at(t, f, y, inner);
    return w.u(y, q) * std::pow(std::abs(v), q);
  };
  QuadratureConfig outer = cfg;
  outer.abs_tol = 1e-300;
  const double R = std::isfinite(f.support_hi()) ? f.support_hi() : 1.0;
  const double wavelength = 2.0 * std::numbers::pi / R;
  // At most mesh_panels initial panels per span; finer oscillation is left to bisection.
  constexpr double mesh_panels = 32.0;
  auto span_integral = [&](double lo, double hi) {
    const double pts[] = {lo, hi};
    return integrate(h, std::span<const double>(pts), outer, std::max(wavelength, (hi - lo) / mesh_panels));
  };

  std::vector<double> marks;
  for (double b : f.breakpoints())
    if (b > 0.0 && std::isfinite(b)) marks.push_back(1.0 / b);
  marks.push_back(1.0);

  if (window) {
    std::vector<double> pts{window->first, window->second};
    for (double m : marks)
      if (m > window->first && m < window->second) pts.push_back(m);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) out += span_integral(pts[i], pts[i + 1]);
  } else {
    double y_top = ry_cap / R;
    const double y_bottom = std::min(*std::min_element(marks.begin(), marks.end()), y_top) * 1e-2;
    // Decade mesh from y_bottom to y_top plus the marks.
    auto mesh_to = [&](double top) {
      std::vector<double> pts{y_bottom};
      while (pts.back() * 10.0 < top) pts.push_back(pts.back() * 10.0);
      pts.push_back(top);
      for (double m : marks)
        if (m > y_bottom && m < top) pts.push_back(m);
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      return pts;
    };
    const auto pts = mesh_to(y_top);
    out = integrate(h, std::span<const double>(pts), outer, wavelength);
    QuadResult low = pittlab::detail::improper_end(h, y_bottom, true, y_bottom, outer);
    out += low;
    if (out.divergent()) return out;
    // Tail beyond y_top from decade ratios; extend the resolved range while they do not shrink.
    double d1 = span_integral(y_top / 100.0, y_top / 10.0).value;
    double d2 = span_integral(y_top / 10.0, y_top).value;
    for (int extension = 0; extension < 2 && !(d1 > 0.0 && d2 / d1 < 0.5); ++extension) {
      const double d3 = span_integral(y_top, 10.0 * y_top).value;
      out.value += d3;
      y_top *= 10.0;
      d1 = d2;
      d2 = d3;
    }
    const double rho = d1 > 0.0 ? d2 / d1 : 1.0;
    if (rho >= 1.0) {
      out.status = QuadStatus::divergent;
      out.site = DivergenceSite::at_infinity;
      return out;
    }
    if (rho >= 0.5) out.status = QuadStatus::non_convergence;
    const double tail = d2 * rho / (1.0 - rho);
    out.value += tail;
    out.error += 0.1 * tail;
  }
  if (out.divergent()) return out;
  const double v = std::pow(std::max(out.value, 0.0), 1.0 / q);
  out.error = out.value > 0.0 ? v * out.error / (q * out.value) : 0.0;
  out.value = v;
  return out;
}

// (int v(x) |x^shift f(x)|^p dx)^{1/p} in the power frame.
inline QuadResult function_norm(const TestFunction& f, const PowerFrameWeights& w, double p,
                                const QuadratureConfig& cfg) {
  if (f.is_zero()) return {};
  auto weight = [&](double x) { return w.v(x, p); };
  QuadratureConfig c = cfg;
  c.abs_tol = 1e-300;
  auto g = [&](double x) { return f(x); };
  std::vector<double> breaks = f.breakpoints();
  breaks.push_back(1.0);
  return weighted_lp_norm(g, NormSpec<decltype(weight)>{p, weight, f.support_lo(), f.support_hi()}, c,
                          std::span<const double>(breaks));
}

// ---------------------------------------------------------------------------
// Ratio records and summaries

struct RatioRecord {
  double param = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs when rhs > 0
  double lhs_error = 0.0;
  double rhs_error = 0.0;
  std::string status = "ok";  // ok, rhs_zero, lhs_divergent, rhs_divergent, non_convergence, error: ...

  bool usable() const { return status == "ok" && std::isfinite(ratio) && rhs > 0.0; }
};

struct RatioSummary {
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  double max_over_median = 0.0;
  bool bounded = false;          // max/median <= 50
  double last3_growth = 0.0;     // ratio(last) / ratio(last param minus 3 decades)
  bool monotone_last3 = false;
  bool unbounded_trend = false;  // monotone over the last 3 decades and growth >= 10
  int usable_rows = 0;
  int divergent_rows = 0;
  int failed_rows = 0;
};

inline constexpr double boundedness_threshold = 50.0;
inline constexpr double unbounded_growth = 10.0;

inline RatioSummary summarize(const std::vector<RatioRecord>& rows) {
  RatioSummary s;
  std::vector<double> ratios;
  std::vector<const RatioRecord*> usable;
  for (const auto& r : rows) {
    if (r.status == "lhs_divergent" || r.status == "rhs_divergent") ++s.divergent_rows;
    else if (r.status != "ok" && r.status != "rhs_zero") ++s.failed_rows;
    if (r.usable()) {
      ratios.push_back(r.ratio);
      usable.push_back(&r);
    }
  }
  s.usable_rows = static_cast<int>(ratios.size());
  if (ratios.empty()) return s;
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median_ratio = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.max_ratio = sorted.back();
  s.max_over_median = s.median_ratio > 0.0 ? s.max_ratio / s.median_ratio : std::numeric_limits<double>::infinity();
  s.bounded = s.divergent_rows == 0 && s.max_over_median <= boundedness_threshold;
  const double top = usable.back()->param;
  std::size_t start = usable.size() - 1;
  while (start > 0 && usable[start - 1]->param >= top / 1000.0 * (1.0 - 1e-12)) --start;
  if (start + 1 < usable.size() && top / usable[start]->param >= 1000.0 * (1.0 - 1e-9)) {
    s.monotone_last3 = true;
    for (std::size_t i = start + 1; i < usable.size(); ++i)
      if (!(usable[i]->ratio > usable[i - 1]->ratio)) s.monotone_last3 = false;
    s.last3_growth = usable.back()->ratio / usable[start]->ratio;
    s.unbounded_trend = s.monotone_last3 && s.last3_growth >= unbounded_growth;
  }
  return s;
}

// Parallel map over indices with results stored by index.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline RatioRecord ratio_record(const ExperimentConfig& c, double param) {
  RatioRecord rec;
  rec.param = param;
  try {
    const TestFunction f = family_member(c, param);
    const PowerFrameWeights w = power_frame(c);
    const QuadResult rhs = function_norm(f, w, c.exps.p, c.quadrature);
    rec.rhs = rhs.value;
    rec.rhs_error = rhs.error;
    if (rhs.divergent()) {
      rec.status = "rhs_divergent";
      rec.rhs = std::numeric_limits<double>::infinity();
      return rec;
    }
    if (!(rec.rhs > 0.0)) {
      rec.status = "rhs_zero";
      return rec;
    }
    const QuadResult lhs = transform_norm(c.transform, f, w, c.exps.q, c.weights.u_window, c.ry_cap, c.quadrature);
    rec.lhs = lhs.value;
    rec.lhs_error = lhs.error;
    if (lhs.divergent()) {
      rec.status = "lhs_divergent";
      rec.lhs = std::numeric_limits<double>::infinity();
      rec.ratio = std::numeric_limits<double>::infinity();
      return rec;
    }
    rec.ratio = rec.lhs / rec.rhs;
    if (!lhs.converged() || !rhs.converged()) rec.status = "non_convergence";
  } catch (const lab_error& e) {
    rec.status = std::string("error: ") + e.what();
  }
  return rec;
}

struct VerifyResult {
  std::vector<RatioRecord> records;
  RatioSummary summary;
};

inline VerifyResult cmd_verify(const ExperimentConfig& c) {
  VerifyResult out;
  out.records.resize(c.family.params.size());
  std::vector<double> params = c.family.params;
  std::sort(params.begin(), params.end());
  parallel_for(params.size(), c.threads, [&](std::size_t i) { out.records[i] = ratio_record(c, params[i]); });
  out.summary = summarize(out.records);
  return out;
}

// ---------------------------------------------------------------------------
// Growth fits

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  int rows = 0;
  GrowthModel model = GrowthModel::log;
};

inline GrowthFit fit_growth(const std::vector<RatioRecord>& rows, GrowthModel model) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (!r.usable() || !(r.ratio > 0.0)) continue;
    double x = std::log(r.param);
    if (model == GrowthModel::loglog) {
      if (!(x > 0.0)) continue;
      x = std::log(x);
    }
    pts.emplace_back(x, std::log(r.ratio));
  }
  if (pts.size() < 4) throw lab_error(errc::fit_degenerate, "growth fit needs at least 4 usable rows, got " + std::to_string(pts.size()));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  const double den = m * sxx - sx * sx;
  if (!(std::abs(den) > 1e-300)) throw lab_error(errc::fit_degenerate, "growth fit abscissae coincide");
  GrowthFit g;
  g.slope = (m * sxy - sx * sy) / den;
  g.intercept = (sy - g.slope * sx) / m;
  g.rows = static_cast<int>(pts.size());
  g.model = model;
  return g;
}

struct ProbeResult {
  VerifyResult verify;
  GrowthFit fit;
};

inline ProbeResult cmd_probe_sharpness(const ExperimentConfig& c) {
  ProbeResult r;
  r.verify = cmd_verify(c);
  r.fit = fit_growth(r.verify.records, c.growth);
  return r;
}

// ---------------------------------------------------------------------------
// Condition bundle

struct ConditionBundle {
  ConditionReport hardy_first;
  ConditionReport hardy_second;
  std::optional<ConditionReport> glued;
  std::string glued_note;
  ConditionReport lorentz;
  std::vector<RangeVerdict> ranges;
  bool all_finite = false;
  bool ranges_satisfied = false;
  bool inside_by_epsilon = false;  // every sufficient range holds at distance >= epsilon from its endpoints
};

inline ConditionBundle cmd_check_conditions(const ExperimentConfig& c) {
  ConditionBundle b;
  const auto& t = c.transform;
  const auto& env = t.envelope();
  if (!env.strict()) throw lab_error(errc::envelope_not_strict, t.label() + " envelope needs b1 - b2 = c1 - c2 > 0");
  const PowerFrameWeights pw = power_frame(c);
  const double bs = t.c0 + env.c1;
  const double gs = t.b0 + env.b1;
  const double q = c.exps.q;
  const double p = c.exps.p;
  const double delta = 2.0 * (env.c1 - env.c2);
  // Reduced weights: u = y^{-beta' q} (beta2' on y <= 1), v = x^{gamma' p}, s = w = x^delta.
  const Weight u = Weight::piecewise(-q * (pw.beta.second - bs), -q * (pw.beta.first - bs));
  const Weight v = Weight::piecewise(p * (pw.gamma.first - gs), p * (pw.gamma.second - gs));
  const Weight s = Weight::power(delta);
  ExponentSet e1 = c.exps;
  e1.a = 1.0;
  std::tie(b.hardy_first, b.hardy_second) = hardy_pair_condition(u, v, s, s, e1);
  try {
    b.glued = glued_condition(u, v, s, s, e1);
  } catch (const lab_error& e) {
    b.glued_note = e.what();
  }
  const Weight v_lorentz = Weight::piecewise(p * (pw.gamma.first - gs) + p * delta, p * (pw.gamma.second - gs) + p * delta);
  b.lorentz = lorentz_necessity_condition(u, v_lorentz, s, e1);

  const std::pair<double, double> beta_r{pw.beta.first - bs, pw.beta.second - bs};
  const std::pair<double, double> gamma_r{pw.gamma.first - gs, pw.gamma.second - gs};
  if (c.weights.piecewise) {
    b.ranges.push_back(piecewise_power_range(delta, c.exps, beta_r, gamma_r));
  } else {
    const RangeQuery qy{pw.beta.first, pw.gamma.first};
    const PittRanges pr = power_pitt_range(t, c.exps, qy);
    b.ranges.push_back(pr.sufficient);
    if (pr.sharp) b.ranges.push_back(*pr.sharp);
    if (t.primitive) {
      try {
        b.ranges.push_back(gm_power_range(t, c.exps, qy));
      } catch (const lab_error&) {
        // primitive bound outside the range where the GM range applies
      }
    }
  }
  b.all_finite = b.hardy_first.finite() && b.hardy_second.finite() && (!b.glued || b.glued->finite());
  b.ranges_satisfied = !b.ranges.empty() && b.ranges.front().satisfied;
  b.inside_by_epsilon = b.ranges_satisfied && b.ranges.front().status == RangeStatus::Satisfied;
  return b;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json json_number(double x) { return std::isfinite(x) ? json(x) : json(fmt17(x)); }

inline double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline json experiment_header(const ExperimentConfig& c) {
  const auto pw = power_frame(c);
  return json{{"experiment_id", c.id},
              {"transform", c.transform.label()},
              {"p", c.exps.p},
              {"q", c.exps.q},
              {"beta", pw.beta.first},
              {"gamma", pw.gamma.first},
              {"seed", c.seed}};
}

inline json to_json(const RatioRecord& r) {
  return json{{"param", r.param},         {"lhs", json_number(r.lhs)},       {"rhs", json_number(r.rhs)},
              {"ratio", json_number(r.ratio)}, {"lhs_error", json_number(r.lhs_error)},
              {"rhs_error", json_number(r.rhs_error)}, {"status", r.status}};
}

inline json to_json(const RatioSummary& s) {
  return json{{"max_ratio", json_number(s.max_ratio)},
              {"median_ratio", json_number(s.median_ratio)},
              {"max_over_median", json_number(s.max_over_median)},
              {"bounded", s.bounded},
              {"last3_growth", json_number(s.last3_growth)},
              {"monotone_last3", s.monotone_last3},
              {"unbounded_trend", s.unbounded_trend},
              {"usable_rows", s.usable_rows},
              {"divergent_rows", s.divergent_rows},
              {"failed_rows", s.failed_rows}};
}

inline json verify_artifact(const ExperimentConfig& c, const VerifyResult& v) {
  json j = experiment_header(c);
  j["kind"] = "verify";
  j["records"] = json::array();
  for (const auto& r : v.records) j["records"].push_back(to_json(r));
  j["summary"] = to_json(v.summary);
  return j;
}

inline json probe_artifact(const ExperimentConfig& c, const ProbeResult& p) {
  json j = verify_artifact(c, p.verify);
  j["kind"] = "probe";
  j["fit"] = {{"model", p.fit.model == GrowthModel::log ? "log" : "loglog"},
              {"slope", p.fit.slope},
              {"intercept", p.fit.intercept},
              {"rows", p.fit.rows}};
  return j;
}

inline json conditions_artifact(const ExperimentConfig& c, const ConditionBundle& b) {
  json j = experiment_header(c);
  j["kind"] = "conditions";
  j["hardy_first"] = b.hardy_first;
  j["hardy_second"] = b.hardy_second;
  j["glued"] = b.glued ? json(*b.glued) : json(nullptr);
  if (!b.glued_note.empty()) j["glued_note"] = b.glued_note;
  j["lorentz_necessity"] = b.lorentz;
  j["ranges"] = b.ranges;
  j["all_finite"] = b.all_finite;
  j["ranges_satisfied"] = b.ranges_satisfied;
  j["inside_by_epsilon"] = b.inside_by_epsilon;
  return j;
}

// CSV of ratio records: 17 significant digits, '\n' line endings.
inline std::string verify_csv(const ExperimentConfig& c, const VerifyResult& v) {
  std::ostringstream os;
  os << "param,lhs,rhs,ratio,lhs_error,rhs_error,status\n";
  for (const auto& r : v.records)
    os << fmt17(r.param) << ',' << fmt17(r.lhs) << ',' << fmt17(r.rhs) << ',' << fmt17(r.ratio) << ','
       << fmt17(r.lhs_error) << ',' << fmt17(r.rhs_error) << ',' << r.status << '\n';
  (void)c;
  return os.str();
}

struct Report {
  std::string csv;
  json summary;
};

// Merges verify/probe and conditions artifacts. Rows are ordered by
// (experiment_id, param); an experiment whose conditions are all Finite
// inside the range and whose ratios are bounded is flagged CONSISTENT.
inline Report cmd_report(const std::vector<json>& artifacts) {
  if (artifacts.empty()) throw lab_error(errc::config, "report needs at least one artifact");
  struct Entry {
    std::optional<json> ratios;
    std::optional<json> conditions;
  };
  std::map<std::string, Entry> by_id;
  for (const auto& a : artifacts) {
    if (!a.is_object() || !a.contains("kind") || !a.contains("experiment_id"))
      throw lab_error(errc::config, "artifact lacks kind or experiment_id");
    const std::string id = a["experiment_id"].get<std::string>();
    const std::string kind = a["kind"].get<std::string>();
    if (kind == "verify" || kind == "probe") by_id[id].ratios = a;
    else if (kind == "conditions") by_id[id].conditions = a;
    else throw lab_error(errc::config, "unknown artifact kind '" + kind + "'");
  }
  Report rep;
  std::ostringstream os;
  os << "experiment_id,transform,p,q,beta,gamma,param,lhs,rhs,ratio,verdicts\n";
  rep.summary = json{{"experiments", json::array()}};
  for (const auto& [id, e] : by_id) {
    const json& head = e.ratios ? *e.ratios : *e.conditions;
    std::string verdicts;
    json item{{"experiment_id", id}};
    std::optional<bool> conditions_ok;
    std::optional<bool> bounded;
    if (e.conditions) {
      const json& cj = *e.conditions;
      verdicts += std::string("hardy=") + cj["hardy_first"]["verdict"].get<std::string>() + "/" +
                  cj["hardy_second"]["verdict"].get<std::string>();
      const bool inside = cj["inside_by_epsilon"].get<bool>();
      verdicts += inside ? ";range=inside" : ";range=outside_or_indeterminate";
      conditions_ok = cj["all_finite"].get<bool>() && inside;
      item["all_finite"] = cj["all_finite"];
      item["inside_by_epsilon"] = inside;
    }
    if (e.ratios) {
      bounded = (*e.ratios)["summary"]["bounded"].get<bool>();
      if (!verdicts.empty()) verdicts += ';';
      verdicts += *bounded ? "bounded" : "not_bounded";
      item["summary"] = (*e.ratios)["summary"];
    }
    std::string flag;
    if (conditions_ok && bounded) {
      if (*conditions_ok && *bounded) flag = "CONSISTENT";
      else if (*conditions_ok && !*bounded) flag = "INCONSISTENT";
    }
    if (!flag.empty()) verdicts += ";" + flag;
    item["flag"] = flag.empty() ? json(nullptr) : json(flag);
    rep.summary["experiments"].push_back(item);

    const std::string prefix = id + "," + head["transform"].get<std::string>() + "," +
                               fmt17(head["p"].get<double>()) + "," + fmt17(head["q"].get<double>()) + "," +
                               fmt17(head["beta"].get<double>()) + "," + fmt17(head["gamma"].get<double>()) + ",";
    if (e.ratios) {
      std::vector<json> rows((*e.ratios)["records"].begin(), (*e.ratios)["records"].end());
      std::stable_sort(rows.begin(), rows.end(),
                       [](const json& a, const json& b) { return a["param"].get<double>() < b["param"].get<double>(); });
      for (const auto& r : rows)
        os << prefix << fmt17(r["param"].get<double>()) << ',' << fmt17(number_from(r["lhs"])) << ','
           << fmt17(number_from(r["rhs"])) << ',' << fmt17(number_from(r["ratio"])) << ',' << verdicts << '\n';
    } else {
      os << prefix << ",,,," << verdicts << '\n';
    }
  }
  rep.csv = os.str();
  return rep;
}

}  // namespace pittlab::lab
