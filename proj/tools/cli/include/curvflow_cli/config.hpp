#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/grid.hpp"
#include "curvflow/scenario.hpp"

namespace curvflow::cli {

enum class FlowKind { mcf, ricci };

struct SweepConfig {
  std::vector<int> resolutions;
  /// Empty selects the auto timestep at every level.
  std::vector<double> dts;
};

/// One config document. Key names follow the document layout:
/// scenario{name, params}, grid{counts}, fd_order, integrator{scheme, dt,
/// t_end, cfl_safety, snapshot_stride}, checks, output_dir, seed, plus the
/// optional flow, snapshot_index, levels, write_snapshots and sweep keys.
struct RunConfig {
  ScenarioSpec scenario;
  FdOrder fd_order = FdOrder::second;
  IntegratorConfig integrator;
  std::vector<std::string> checks;
  std::string output_dir = "curvflow_out";
  std::uint64_t seed = 0;
  std::optional<FlowKind> flow;
  std::optional<std::size_t> snapshot_index;
  std::optional<int> levels;
  bool write_snapshots = true;
  std::optional<SweepConfig> sweep;
};

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> fd_order;
};

/// Parses a config document. Any structural or value error raises ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

void apply_overrides(RunConfig& c, const Overrides& o);

FdOrder parse_fd_order(int p);
const char* flow_name(FlowKind f);

}  // namespace curvflow::cli
