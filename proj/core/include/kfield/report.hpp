#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kfield::cli {

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<int> excluded_steps;
  std::string detail;
};

struct RunReport {
  std::string scenario;
  int schema_version = 1;
  std::vector<CheckResult> checks;

  // environment stamp
  std::string version;
  std::string timestamp;  // the only time-dependent field; excluded from diffs
  std::uint64_t seed = 0;
  std::string scheme;
  double h = 0.0;
  int n = 0;

  bool all_passed() const;
};

std::string report_to_json(const RunReport& r);
RunReport report_from_json(const std::string& text);
void write_report(const RunReport& r, const std::string& path);
RunReport load_report(const std::string& path);

struct DiffEntry {
  std::string check;
  double residual_a = 0.0;
  double residual_b = 0.0;
  double ratio = 1.0;      // residual_a / residual_b
  bool regression = false; // b worsened by more than 2x
};

// Per-check residual comparison of two reports for the same scenario name.
// Checks with bitwise-equal residuals are omitted, so identical reports give
// an empty diff. Throws MismatchError when the scenario names differ.
std::vector<DiffEntry> compare_runs(const RunReport& a, const RunReport& b);

}  // namespace kfield::cli
