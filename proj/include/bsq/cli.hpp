#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace bsq::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

/// One row of a suite report. margin = rhs - lhs.
struct CheckRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

struct SuiteReport {
  std::string subcommand;
  nlohmann::ordered_json config;
  std::vector<CheckRecord> checks;
  nlohmann::ordered_json details;
  bool pass() const;
  std::string to_json() const;
  /// Header "check,lhs,rhs,margin,pass" followed by one line per check.
  std::string to_csv() const;
};

/// Exit codes: 0 all checks pass, 1 at least one violation, 2 usage or configuration error.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace bsq::cli
