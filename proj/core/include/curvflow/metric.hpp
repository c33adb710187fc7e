#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "curvflow/tensor_field.hpp"

namespace curvflow {

/// Symmetric rank-2 covariant metric with its nodewise inverse and determinant.
///
/// The input is symmetrized on construction. Inversion is explicit for n <= 3
/// and LU-based otherwise. Singular nodes raise DegenerateMetricError; when
/// `riemannian` is set, so do nodes that are not positive-definite.
class MetricField {
 public:
  explicit MetricField(TensorField g, bool riemannian = true);

  const TensorField& g() const { return g_; }
  const TensorField& inverse() const { return g_inv_; }
  const std::vector<double>& det() const { return det_; }
  const GridPtr& grid_ptr() const { return g_.grid_ptr(); }
  const ChartGrid& grid() const { return g_.grid(); }
  int dim() const { return g_.dim(); }
  bool riemannian() const { return riemannian_; }

 private:
  TensorField g_;
  TensorField g_inv_;
  std::vector<double> det_;
  bool riemannian_;
};

/// Smallest eigenvalue of g over the given nodes.
double min_eigenvalue(const MetricField& m, std::span<const std::size_t> nodes);
/// Largest eigenvalue of g^{-1} over the given nodes.
double max_inverse_eigenvalue(const MetricField& m, std::span<const std::size_t> nodes);

/// Contract index slot `slot` of t with the metric (lower) or inverse (raise).
/// Ambient components pass through unchanged.
TensorField lower_index(const TensorField& t, const MetricField& m, int slot);
TensorField raise_index(const TensorField& t, const MetricField& m, int slot);

}  // namespace curvflow
