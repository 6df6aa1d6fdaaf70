#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "bsq/cli.hpp"

namespace fs = std::filesystem;
using bsq::cli::run;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bsq_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json run_json(std::vector<std::string> args, const std::string& file, int expected = 0) {
  const fs::path out = scratch(file);
  args.push_back("--out");
  args.push_back(out.string());
  CHECK(run(args) == expected);
  return nlohmann::json::parse(slurp(out));
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run(std::vector<std::string>{}) == 2);
  CHECK(run({"no-such-command"}) == 2);
  CHECK(run({"geom-lemma", "--bogus", "1"}) == 2);
  CHECK(run({"certify-bellman", "--kind", "other"}) == 2);
  CHECK(run({"geom-lemma", "--format", "xml"}) == 2);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(run({"geom-lemma", "--c", "0.5", "--trials", "10", "--out", scratch("bad.json").string()}) == 2);
  CHECK(run({"ap-probe", "--weight", scratch("missing.csv").string()}) == 2);
  CHECK(run({"simulate-martingale", "--steps", "3", "--out", scratch("bad2.json").string()}) == 2);
}

TEST_CASE("documented examples succeed") {
  const auto cert = run_json({"certify-bellman", "--kind", "main", "--c", "2", "--samples", "100000", "--seed", "7"},
                             "cert.json");
  CHECK(cert["pass"] == true);
  CHECK(cert["subcommand"] == "certify-bellman");
  const auto dy = run_json({"verify-dyadic", "--which", "lower160", "--depth", "10", "--instances", "100", "--seed", "1"},
                           "dyadic.json");
  CHECK(dy["pass"] == true);
  CHECK(dy["checks"].size() == 2);
}

TEST_CASE("report schema") {
  const auto j = run_json({"geom-lemma", "--trials", "2000", "--seed", "3"}, "geom.json");
  CHECK(j["schema"] == 1);
  CHECK(j["tool"] == "bsq");
  CHECK(j["version"] == bsq::cli::kToolVersion);
  CHECK(j["config"]["seed"] == 3);
  CHECK(j["config"]["format"] == "json");
  bool all = true;
  for (const auto& c : j["checks"]) {
    for (const char* key : {"name", "lhs", "rhs", "margin", "pass"}) CHECK(c.contains(key));
    CHECK(c["margin"].get<double>() == doctest::Approx(c["rhs"].get<double>() - c["lhs"].get<double>()));
    all = all && c["pass"].get<bool>();
  }
  CHECK(j["pass"] == all);
  CHECK(j.contains("details"));
}

TEST_CASE("csv output") {
  const fs::path out = scratch("ap.csv");
  CHECK(run({"ap-probe", "--alpha", "0.5", "--depth", "8", "--format", "csv", "--out", out.string()}) == 0);
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  CHECK(line == "check,lhs,rhs,margin,pass");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
    CHECK(line.substr(line.rfind(',') + 1) == "true");
  }
  CHECK(rows >= 1);
}

TEST_CASE("failing checks exit with 1") {
  // A negative tolerance cannot be met.
  const auto j = run_json({"ap-probe", "--depth", "6", "--tol", "-1"}, "fail.json", 1);
  CHECK(j["pass"] == false);
  CHECK(j["checks"][0]["pass"] == false);
}

TEST_CASE("reports do not depend on the thread count") {
  const std::vector<std::vector<std::string>> suites{
      {"simulate-martingale", "--steps", "64", "--trials", "4000", "--seed", "5", "--integrand", "sign_b"},
      {"verify-dyadic", "--which", "upper_ar", "--r", "1.5", "--depth", "6", "--instances", "50", "--seed", "2"},
      {"certify-bellman", "--kind", "ar", "--c", "2", "--r", "1.5", "--samples", "5000", "--seed", "4"},
  };
  int n = 0;
  for (const auto& base : suites) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "3"}) {
      ::setenv("BSQ_THREADS", threads, 1);
      const fs::path out = scratch("threads_" + std::to_string(n) + "_" + threads + ".json");
      std::vector<std::string> args(base);
      args.push_back("--out");
      args.push_back(out.string());
      CHECK(run(args) == 0);
      outputs.push_back(slurp(out));
    }
    ::unsetenv("BSQ_THREADS");
    CHECK(outputs[0] == outputs[1]);
    CHECK_FALSE(outputs[0].empty());
    ++n;
  }
}
