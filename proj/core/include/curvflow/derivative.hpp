#pragma once

#include <span>
#include <vector>

#include "curvflow/grid.hpp"
#include "curvflow/tensor_field.hpp"

namespace curvflow {

/// Finite-difference weights for derivative `order` at 0 from samples at
/// `offsets` (Fornberg's recursion).
std::vector<double> fd_weights(std::span<const int> offsets, int order);

/// Componentwise d/dx^axis. Output keeps the input variances.
TensorField partial_derivative(const TensorField& f, int axis, FdOrder p);

/// Componentwise d^2/dx^a dx^b. Uses the compact second-difference stencil
/// when a == b and a composition of first differences otherwise, so the
/// operator is exactly symmetric in (a, b).
TensorField second_partial(const TensorField& f, int a, int b, FdOrder p);

/// Raw kernel: derivative of `deriv` order (1 or 2) along `axis` of a
/// node-major buffer carrying `comps` values per node.
void apply_axis_derivative(const ChartGrid& grid, std::span<const double> in,
                           std::span<double> out, std::size_t comps, int axis, int deriv,
                           FdOrder p);

}  // namespace curvflow
