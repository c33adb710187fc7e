#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "curvflow/embedding.hpp"
#include "curvflow/metric.hpp"
#include "curvflow/scenario.hpp"

namespace curvflow {

enum class Scheme { explicit_euler, rk4 };

struct IntegratorConfig {
  Scheme scheme = Scheme::rk4;
  /// Empty selects suggest_dt(initial state, cfl_safety).
  std::optional<double> dt;
  double t_end = 0.1;
  double cfl_safety = 0.5;
  int snapshot_stride = 1;
};

/// Timestep and step count actually used: t_end is hit exactly and the step
/// count is a multiple of the snapshot stride.
struct Schedule {
  double dt = 0.0;
  long steps = 0;
  int stride = 1;
};

struct FlowState {
  double t = 0.0;
  std::variant<EmbeddingField, MetricField> payload;

  bool is_embedding() const { return std::holds_alternative<EmbeddingField>(payload); }
  const EmbeddingField& embedding() const { return std::get<EmbeddingField>(payload); }
  const MetricField& metric() const { return std::get<MetricField>(payload); }
};

struct FlowTrajectory {
  std::string scenario;
  IntegratorConfig config;
  Schedule schedule;
  std::vector<FlowState> snapshots;
  /// Set when the metric degenerated mid-run; snapshots stop at the last
  /// accepted step.
  bool degenerated = false;
  std::string degeneration;

  double snapshot_spacing() const { return schedule.dt * schedule.stride; }
};

/// Mean curvature flow velocity g^ij nabla_ij X on band nodes, zero on halo.
TensorField mcf_rhs(const EmbeddingField& e, FdOrder p);

/// -2 eta(nabla^2 X, nabla_ij X): the metric velocity induced by the flow.
TensorField metric_evolution_rhs(const EmbeddingField& e, FdOrder p);

/// safety * min_i h_i^2 / (2 n max_nodes lambda_max(g^-1)), over band nodes.
double suggest_dt(const EmbeddingField& e, double safety, FdOrder p);
double suggest_dt(const MetricField& m, double safety);

/// One step of d/dt g_ij = -2 R_ij on band nodes; halo refilled per stage.
MetricField ricci_flow_step(const MetricField& m, double dt, Scheme scheme, FdOrder p);

/// Resolves dt (auto or explicit) against the stability bound and the
/// extinction guard. Throws TimestepError or ConfigError.
Schedule resolve_schedule(const IntegratorConfig& c, double suggested_auto,
                          double stability_bound, std::optional<double> extinction);

FlowTrajectory integrate_mcf(const Scenario& s, const IntegratorConfig& c, FdOrder p);
FlowTrajectory integrate_ricci_flow(const Scenario& s, const IntegratorConfig& c, FdOrder p);

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

}  // namespace curvflow
