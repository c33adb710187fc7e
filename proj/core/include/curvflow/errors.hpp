#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvflow {

/// Invalid parameters, scenario names, grid setup or missing boundary data.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched grids, ranks or index variances between operands.
class ShapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A metric that is singular (or not positive-definite when declared Riemannian).
class DegenerateMetricError : public std::runtime_error {
 public:
  DegenerateMetricError(const std::string& what, std::size_t node)
      : std::runtime_error(what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// Induced metric of an embedding lost rank at some node.
class DegenerateEmbeddingError : public DegenerateMetricError {
 public:
  using DegenerateMetricError::DegenerateMetricError;
};

/// Requested timestep exceeds the explicit stability bound.
class TimestepError : public std::runtime_error {
 public:
  TimestepError(const std::string& what, double suggested)
      : std::runtime_error(what), suggested_(suggested) {}
  double suggested_dt() const noexcept { return suggested_; }

 private:
  double suggested_;
};

}  // namespace curvflow
