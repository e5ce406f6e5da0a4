#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "pittlab/lab.hpp"

using namespace pittlab;
using namespace pittlab::lab;
using nlohmann::json;

namespace {

json hankel(double beta, double gamma, json r_grid) {
  return {{"id", "hankel"},
          {"transform", {{"preset", "hankel"}, {"alpha", 0.0}}},
          {"exps", {{"p", 2.0}, {"q", 2.0}}},
          {"weights", {{"frame", "fourier"}, {"beta", beta}, {"gamma", gamma}}},
          {"family", {{"kind", "truncated_power"}, {"d", 0.0}, {"r", r_grid}}}};
}

errc config_error_code(const json& j) {
  try {
    parse_config(j);
  } catch (const lab_error& e) {
    return e.code();
  }
  return errc::domain;
}

}  // namespace

TEST_CASE("config parsing rejects incomplete or inconsistent input", "[lab]") {
  json missing = hankel(0.25, 0.25, json::array({1.0}));
  missing["weights"].erase("beta");
  CHECK(config_error_code(missing) == errc::config);

  json preset = hankel(0.25, 0.25, json::array({1.0}));
  preset["transform"]["preset"] = "laplace";
  CHECK(config_error_code(preset) == errc::config);

  json mismatched = hankel(0.0, 0.0, json::array({1.0}));
  mismatched["weights"]["beta"] = {0.3, 0.2};
  mismatched["weights"]["gamma"] = {0.3, 0.3};
  CHECK(config_error_code(mismatched) == errc::config);

  json empty = hankel(0.25, 0.25, json::array());
  CHECK(config_error_code(empty) == errc::config);

  const auto c = parse_config(hankel(0.25, 0.25, {{"lo", 1e-3}, {"hi", 1e3}, {"n", 7}}));
  CHECK(c.family.params.size() == 7);
  const auto pw = power_frame(c);
  CHECK(pw.beta.first == 0.25);
  CHECK(pw.gamma.first == 1.25);
}

TEST_CASE("check-conditions inside the range and at the endpoint", "[lab]") {
  const auto in = cmd_check_conditions(parse_config(hankel(0.25, 0.25, json::array({1.0}))));
  CHECK(in.all_finite);
  CHECK(in.lorentz.finite());
  CHECK(in.ranges_satisfied);
  CHECK(in.inside_by_epsilon);
  const auto edge = cmd_check_conditions(parse_config(hankel(0.5, 0.5, json::array({1.0}))));
  CHECK_FALSE(edge.hardy_first.finite());
  CHECK_FALSE(edge.ranges_satisfied);
}

TEST_CASE("piecewise check-conditions", "[lab]") {
  json j = {{"id", "pw"},
            {"transform", {{"preset", "modelmin"}, {"delta", 1.0}}},
            {"exps", {{"p", 2.0}, {"q", 2.0}}},
            // Power frame: gamma = beta + b0 for the model transform.
            {"weights", {{"beta", {0.3, 0.2}}, {"gamma", {1.3, 1.2}}}},
            {"family", {{"kind", "zero"}, {"r", json::array({1.0})}}}};
  const auto b = cmd_check_conditions(parse_config(j));
  CHECK(b.all_finite);
  CHECK(b.ranges_satisfied);
}

TEST_CASE("zero family yields rhs = 0 rows that the summary skips", "[lab]") {
  json j = hankel(0.25, 0.25, json::array({1.0, 2.0}));
  j["family"] = {{"kind", "zero"}, {"r", json::array({1.0, 2.0})}};
  const auto v = cmd_verify(parse_config(j));
  REQUIRE(v.records.size() == 2);
  for (const auto& r : v.records) CHECK(r.status == "rhs_zero");
  CHECK(v.summary.usable_rows == 0);
}

TEST_CASE("inside-range verify is bounded and the control fit is flat", "[lab]") {
  auto c = parse_config(hankel(0.25, 0.25, json::array({0.01, 0.1, 1.0, 10.0})));
  c.threads = 2;
  const auto v = cmd_verify(c);
  CHECK(v.summary.bounded);
  CHECK(v.summary.usable_rows == 4);
  for (const auto& r : v.records) CHECK(r.ratio == Catch::Approx(r.lhs / r.rhs));
  const auto fit = fit_growth(v.records, GrowthModel::log);
  CHECK(std::abs(fit.slope) < 0.05);
}

TEST_CASE("endpoint probe with divergent norms has too few rows to fit", "[lab]") {
  json j = {{"id", "scripth_endpoint"},
            {"transform", {{"preset", "scripth"}, {"alpha", 0.0}}},
            {"exps", {{"p", 2.0}, {"q", 2.0}}},
            {"weights", {{"beta", 2.0}, {"gamma", 2.0}}},
            {"family", {{"kind", "truncated_power"}, {"d", 2.0}, {"r", json::array({0.1, 1.0, 10.0, 100.0})}}}};
  const auto c = parse_config(j);
  const auto v = cmd_verify(c);
  CHECK(v.summary.divergent_rows == 4);
  try {
    fit_growth(v.records, GrowthModel::log);
    FAIL("expected a degenerate fit");
  } catch (const lab_error& e) {
    CHECK(e.code() == errc::fit_degenerate);
  }
}

TEST_CASE("report merges artifacts deterministically", "[lab]") {
  const auto c = parse_config(hankel(0.25, 0.25, json::array({10.0, 1.0})));
  const auto v = cmd_verify(c);
  const auto again = cmd_verify(c);
  CHECK(verify_csv(c, v) == verify_csv(c, again));

  const json va = verify_artifact(c, v);
  const auto one = cmd_report({va});
  // Header plus one row per family parameter, ordered by parameter.
  std::istringstream lines(one.csv);
  std::string header, first, second, extra;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(header == "experiment_id,transform,p,q,beta,gamma,param,lhs,rhs,ratio,verdicts");
  CHECK(first.find(",1,") != std::string::npos);
  CHECK(second.find(",10,") != std::string::npos);

  const json ca = conditions_artifact(c, cmd_check_conditions(c));
  const auto merged = cmd_report({ca, va});
  CHECK(merged.summary["experiments"][0]["flag"] == "CONSISTENT");
  CHECK(merged.csv.find("CONSISTENT") != std::string::npos);

  try {
    cmd_report({});
    FAIL("expected a usage error");
  } catch (const lab_error& e) {
    CHECK(e.code() == errc::config);
  }
}

TEST_CASE("command-line tool end to end", "[lab][cli]") {
  const char* cli = std::getenv("PITTLAB_CLI");
  if (!cli) SKIP("PITTLAB_CLI not set");
  const auto dir = std::filesystem::temp_directory_path() / "pittlab_cli_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto config = dir / "hankel.json";
  std::ofstream(config) << hankel(0.25, 0.25, json::array({1.0})).dump();
  const std::string out = (dir / "out").string();
  const std::string base = std::string("\"") + cli + "\"";
  CHECK(std::system((base + " verify --config " + config.string() + " --out " + out + " 2>/dev/null").c_str()) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "hankel.verify.csv"));
  CHECK(std::system((base + " check-conditions --config " + config.string() + " --out " + out + " 2>/dev/null").c_str()) == 0);
  const std::string report = base + " report --out " + out + " " + (dir / "out" / "hankel.verify.json").string() + " " +
                             (dir / "out" / "hankel.conditions.json").string() + " 2>/dev/null";
  CHECK(std::system(report.c_str()) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "report.csv"));
  const int empty = std::system((base + " report 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(empty) == 2);
  std::ofstream(dir / "bad.json") << R"({"transform": {"preset": "hankel"}})";
  const int bad = std::system((base + " verify --config " + (dir / "bad.json").string() + " 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
}
