#pragma once

// Scenario runner behind the command-line tool. A scenario produces numeric
// tables (written as CSV) and a list of checks, each comparing an observed
// verdict with the one the scenario expects.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wvlab/json_io.hpp"

namespace wvlab {

inline constexpr const char* kVersion = "0.1.0";

struct ScenarioConfig {
  std::string scenario = "ex5";  ///< ex3, ex5, lift-demo or acceptance
  double p = 2.0;
  std::int64_t n_min = 1;
  std::int64_t n_max = 50;
  double tol = 1e-9;   ///< agreement with closed forms
  double eps = 1e-3;   ///< calibration slack of sphere tests
  std::size_t budget = 8;
  std::uint64_t seed = 20240611;
  std::filesystem::path out_dir = "out";
};

/// Missing keys keep their defaults. Unknown scenarios throw ParseError.
ScenarioConfig config_from_json(const Json& j);
Json to_json(const ScenarioConfig& cfg);

struct Table {
  std::string name;  ///< file stem of the CSV
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Check {
  std::string name;
  std::string expected;
  std::string observed;
  Json detail;

  bool met() const { return expected == observed; }
};

struct Report {
  std::string scenario;
  ScenarioConfig config;
  std::vector<Table> tables;
  std::vector<Check> checks;
  Json environment;
  bool complete = true;
  std::string error;

  bool expectations_met() const;
};

/// Errors raised by a step stop the scenario; the partial report comes back
/// with complete = false and the error message.
Report run_scenario(const ScenarioConfig& cfg);

/// Writes report.json and <table>.csv for every table into `dir`.
void emit_report(const Report& report, const std::filesystem::path& dir);

Json to_json(const Report& report);
std::string to_csv(const Table& table);

}  // namespace wvlab
