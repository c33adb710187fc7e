#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curvflow_cli/config.hpp"

namespace curvflow::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kDegenerated = 3,
  kCheckFailed = 4,
};

/// Integrates the configured flow; writes timeseries.csv, report.json and
/// snapshots/. Returns kDegenerated (and writes DEGENERATED) when the flow
/// broke down mid-run.
int cmd_run(const RunConfig& c, std::ostream& log);

/// Runs the configured checks on a refinement ladder ending at the configured
/// grid; writes report.json and prints a table.
int cmd_verify(const RunConfig& c, std::ostream& log);

/// Convergence study over sweep.resolutions; writes convergence.csv and
/// report.json.
int cmd_sweep(const RunConfig& c, std::ostream& log);

/// Full command line front end; maps exceptions to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curvflow::cli
