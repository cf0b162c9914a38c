#pragma once

#include <picheck/equiv.hpp>

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace picheck {

inline constexpr const char* tool_version = "0.1.0";

// Machine-readable outcome of one check.
struct CheckReport {
  std::vector<std::string> command;
  // One of sat, unsat, related-up-to-bound, distinguished, error.
  std::string verdict;
  double elapsed_seconds = 0;
  nlohmann::json budget = nlohmann::json::object();
  nlohmann::json strategy;  // null unless distinguished
  std::string message;
  std::string version = tool_version;

  bool operator==(const CheckReport&) const = default;
};

bool is_report_verdict(std::string_view verdict);

// Throws nlohmann::json::exception on a malformed report and Error on an
// unknown verdict.
void to_json(nlohmann::json& j, const CheckReport& r);
void from_json(const nlohmann::json& j, CheckReport& r);

nlohmann::json strategy_to_json(const Strategy& s);

// Runs `picheck <args>`. Exit code 2 on usage errors, 1 when regress finds a
// mismatch, 0 otherwise.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace picheck
