// Command-line front end: verify, probe-sharpness, check-conditions, report, eval-kernel.
// Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pittlab/pittlab.hpp"

namespace fs = std::filesystem;
using namespace pittlab;
using nlohmann::json;

namespace {

constexpr int exit_numerical = 1;
constexpr int exit_usage = 2;

struct Options {
  std::string config_path;
  std::string out_dir;
  unsigned threads = 1;
  double tol = 0.0;  // 0 keeps the configured rel_tol
};

lab::ExperimentConfig load(const Options& o) {
  auto c = lab::load_config(o.config_path);
  c.threads = o.threads;
  if (o.tol > 0.0) {
    c.quadrature.rel_tol = o.tol;
    c.quadrature.validate();
  }
  return c;
}

void emit(const Options& o, const std::string& name, const std::string& content) {
  if (o.out_dir.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  const fs::path path = fs::path(o.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lab_error(errc::io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw lab_error(errc::io, "write failed for '" + path.string() + "'");
  std::cerr << "wrote " << path.string() << '\n';
}

// A run fails numerically when most rows did not converge.
int ratio_exit(const lab::VerifyResult& v) {
  return 2 * v.summary.failed_rows > static_cast<int>(v.records.size()) ? exit_numerical : 0;
}

int run_verify(const Options& o) {
  const auto c = load(o);
  const auto v = lab::cmd_verify(c);
  const json artifact = lab::verify_artifact(c, v);
  if (c.output_format == "json" || !o.out_dir.empty()) emit(o, c.id + ".verify.json", artifact.dump(2));
  if (c.output_format == "csv") emit(o, c.id + ".verify.csv", lab::verify_csv(c, v));
  return ratio_exit(v);
}

int run_probe(const Options& o) {
  const auto c = load(o);
  const auto p = lab::cmd_probe_sharpness(c);
  emit(o, c.id + ".probe.json", lab::probe_artifact(c, p).dump(2));
  if (c.output_format == "csv") emit(o, c.id + ".probe.csv", lab::verify_csv(c, p.verify));
  return ratio_exit(p.verify);
}

int run_conditions(const Options& o) {
  const auto c = load(o);
  const auto b = lab::cmd_check_conditions(c);
  emit(o, c.id + ".conditions.json", lab::conditions_artifact(c, b).dump(2));
  return 0;
}

int run_report(const Options& o, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw lab_error(errc::config, "report needs at least one artifact");
  std::vector<json> artifacts;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw lab_error(errc::io, "cannot open artifact '" + path + "'");
    try {
      artifacts.push_back(json::parse(in));
    } catch (const json::parse_error& e) {
      throw lab_error(errc::config, "artifact '" + path + "' is not valid JSON: " + e.what());
    }
  }
  const auto rep = lab::cmd_report(artifacts);
  emit(o, "report.csv", rep.csv);
  emit(o, "report.json", rep.summary.dump(2));
  return 0;
}

int run_eval_kernel(const std::string& kind, double param, const std::vector<double>& xs, double y) {
  KernelSpec k = [&] {
    if (kind == "bessel") return bessel_kernel(param);
    if (kind == "struve") return struve_kernel(param);
    if (kind == "sine") return sine_kernel();
    if (kind == "cosine") return cosine_kernel();
    if (kind == "modelmin") return model_min_kernel(param);
    throw lab_error(errc::config, "unknown kernel kind '" + kind + "'");
  }();
  std::cout << "x,y,K\n";
  for (double x : xs) std::cout << lab::fmt17(x) << ',' << lab::fmt17(y) << ',' << lab::fmt17(k(x, y)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted norm inequality lab for Fourier-type transforms"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", o.config_path, "experiment config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory (stdout when omitted)");
    sub->add_option("--threads", o.threads, "worker threads over family parameters")->check(CLI::Range(1u, 256u));
    sub->add_option("--tol", o.tol, "quadrature relative tolerance override")->check(CLI::PositiveNumber);
  };

  auto* verify = app.add_subcommand("verify", "ratio table over the family grid");
  add_common(verify, true);
  auto* probe = app.add_subcommand("probe-sharpness", "ratio table with a growth-law fit");
  add_common(probe, true);
  auto* conditions = app.add_subcommand("check-conditions", "Hardy-type conditions and analytic ranges");
  add_common(conditions, true);
  auto* report = app.add_subcommand("report", "merge run artifacts into CSV and JSON summary");
  add_common(report, false);
  std::vector<std::string> inputs;
  report->add_option("artifacts", inputs, "artifact JSON files");

  auto* eval = app.add_subcommand("eval-kernel", "evaluate a kernel at K(x, y)");
  std::string kind;
  double param = 0.0;
  std::vector<double> xs;
  double y = 1.0;
  eval->add_option("--kind", kind, "bessel | struve | sine | cosine | modelmin")->required();
  auto* alpha = eval->add_option("--alpha", param, "order for bessel/struve");
  eval->add_option("--delta", param, "exponent for modelmin")->excludes(alpha);
  eval->add_option("--x", xs, "x values")->required()->delimiter(',');
  eval->add_option("--y", y, "y value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    if (*verify) return run_verify(o);
    if (*probe) return run_probe(o);
    if (*conditions) return run_conditions(o);
    if (*report) return run_report(o, inputs);
    if (*eval) return run_eval_kernel(kind, param, xs, y);
  } catch (const lab_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == errc::config || e.code() == errc::io ? exit_usage : exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_usage;
}
