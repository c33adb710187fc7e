#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvflow/embedding.hpp"
#include "curvflow/metric.hpp"

namespace curvflow {

using ParamMap = std::map<std::string, double>;

/// Analytic companions of a preset. Every hook is optional.
struct ScenarioOracles {
  /// g_ij at chart point x, t = 0 (n*n row-major).
  std::function<void(std::span<const double> x, std::span<double> g)> metric;
  /// d g_ij / dx^a at chart point x, t = 0.
  std::function<void(std::span<const double> x, int a, std::span<double> dg)> metric_derivative;
  /// Scalar curvature at chart point x, t = 0.
  std::function<double(std::span<const double> x)> scalar_curvature;
  /// R_ijkl at chart point x, t = 0 (n^4 row-major).
  std::function<void(std::span<const double> x, std::span<double> r)> riemann;
  /// Exact radius observables under mean curvature flow at time t.
  std::function<std::vector<double>(double t)> flow_radii;
  /// Exact spatially constant scalar curvature under mean curvature flow.
  std::function<double(double t)> flow_scalar_curvature;
  /// Exact spatially constant scalar curvature under Ricci flow.
  std::function<double(double t)> ricci_flow_scalar_curvature;
  /// Exact d R / dt under mean curvature flow.
  std::function<double(double t)> flow_scalar_rate;
  /// nabla^2 R - 4 Ric.Ric - 2 Riem.Riem evaluated on the exact flow solution.
  std::function<double(double t)> flow_scalar_quadratic_rhs;
  /// Exact d R / dt under Ricci flow.
  std::function<double(double t)> ricci_flow_scalar_rate;
  /// Time at which the exact mean curvature flow degenerates.
  std::optional<double> extinction_time;
  /// Same for Ricci flow.
  std::optional<double> ricci_extinction_time;
};

struct ScenarioSpec {
  std::string name;
  ParamMap params;
  /// Samples per axis; a single entry is broadcast to every axis, empty
  /// selects the preset default.
  std::vector<int> counts;
  std::uint64_t seed = 0;
};

/// A constructed preset: chart grid, initial state and oracles.
struct Scenario {
  std::string name;
  ParamMap params;
  GridPtr grid;
  /// Absent for intrinsic-only presets (random_metric_torus).
  std::optional<EmbeddingField> embedding;
  ScenarioOracles oracles;
  /// Names of the radius observables reported by `radii`.
  std::vector<std::string> radius_names;
  std::function<std::vector<double>(const EmbeddingField&)> radii;

  /// Metric at t = 0: the analytic oracle sampled on the grid when present,
  /// otherwise the induced metric.
  MetricField initial_metric(FdOrder p) const;
};

/// Registered preset names.
std::vector<std::string> scenario_names();

/// Builds a preset. Rejects unknown names and invalid parameters with
/// ConfigError; checks the induced metric against the metric oracle.
Scenario make_scenario(const ScenarioSpec& spec, FdOrder p = FdOrder::second);

/// Unit vector of the round n-sphere in hyperspherical chart coordinates
/// (theta_1, ..., theta_{n-1}, phi).
void sphere_unit_vector(std::span<const double> x, std::span<double> u);
/// Round unit-sphere metric diag(1, sin^2 theta_1, ...) in the same chart.
void sphere_unit_metric(std::span<const double> x, std::span<double> g);

/// Chart coordinates of a stored node.
std::vector<double> node_coordinates(const ChartGrid& grid, std::size_t node);

}  // namespace curvflow
