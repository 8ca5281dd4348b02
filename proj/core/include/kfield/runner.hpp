#pragma once

#include <optional>
#include <string>

#include "kfield/report.hpp"
#include "kfield/scenario.hpp"

namespace kfield::cli {

struct RunOptions {
  std::string output_dir;  // overrides scenario/output_dir and KFIELD_OUT
  std::optional<std::uint64_t> seed_override;
  bool write_artifacts = true;  // false: report only (the `check` subcommand)
  bool trajectory_only_checks = false;   // run only isotropy/geodesic/p0/eq10
  bool dispersion_only = false;          // run only the dispersion scan
  bool stability_only = false;           // run only the stability scan
};

// Precedence: options.output_dir, scenario.output_dir, $KFIELD_OUT, "out".
// Artifacts land in <resolved>/<scenario name>/.
std::string resolve_output_dir(const Scenario& s, const RunOptions& opts);

/// Execute the requested checks, write scenario-scoped artifacts
/// (trajectory.csv, dispersion.csv, stability.csv as applicable) and
/// report.json, and return the report. Check-level failures never throw:
/// they are mapped into report entries; `error` details mark checks that
/// could not be evaluated at all.
RunReport run_scenario(const Scenario& s, const RunOptions& opts = {});

// 0 when every check passed, 2 when some check failed, 1 when a check
// errored out (detail starts with "error:").
int exit_code_for(const RunReport& report);

}  // namespace kfield::cli
