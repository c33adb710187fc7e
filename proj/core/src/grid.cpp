#include "curvflow/grid.hpp"

#include <string>

#include "curvflow/errors.hpp"

namespace curvflow {

ChartGrid::ChartGrid(std::vector<AxisSpec> axes,
                     std::shared_ptr<const BoundaryProvider> provider)
    : axes_(std::move(axes)), provider_(std::move(provider)) {
  if (axes_.empty() || dim() > kMaxDim) {
    throw ConfigError("chart dimension must be in [1, " + std::to_string(kMaxDim) +
                      "], got " + std::to_string(axes_.size()));
  }
  extents_.resize(axes_.size());
  spacing_.resize(axes_.size());
  strides_.resize(axes_.size());
  for (int a = 0; a < dim(); ++a) {
    auto& ax = axes_[a];
    if (ax.count < 4) {
      throw ConfigError("axis " + std::to_string(a) + " has " + std::to_string(ax.count) +
                        " samples; at least 4 are required");
    }
    if (!(ax.extent > 0.0)) {
      throw ConfigError("axis " + std::to_string(a) + " has non-positive extent");
    }
    if (ax.mode == BoundaryMode::periodic) {
      ax.halo = 0;
    } else if (ax.halo < 1) {
      throw ConfigError("ghost axis " + std::to_string(a) + " needs a halo of at least 1");
    }
    extents_[a] = ax.count + 2 * ax.halo;
    spacing_[a] = ax.extent / ax.count;
  }
  std::size_t s = 1;
  for (int a = dim() - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= static_cast<std::size_t>(extents_[a]);
  }
  node_count_ = s;
}

bool ChartGrid::has_ghost_axes() const {
  for (const auto& ax : axes_) {
    if (ax.mode == BoundaryMode::ghost) return true;
  }
  return false;
}

NodeIndex ChartGrid::unravel(std::size_t node) const {
  NodeIndex idx{};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(node / strides_[a]);
    node %= strides_[a];
  }
  return idx;
}

std::size_t ChartGrid::ravel(const NodeIndex& idx) const {
  std::size_t node = 0;
  for (int a = 0; a < dim(); ++a) node += static_cast<std::size_t>(idx[a]) * strides_[a];
  return node;
}

bool ChartGrid::in_band(std::size_t node) const {
  const auto idx = unravel(node);
  for (int a = 0; a < dim(); ++a) {
    const int j = idx[a] - axes_[a].halo;
    if (j < 0 || j >= axes_[a].count) return false;
  }
  return true;
}

std::vector<std::size_t> ChartGrid::interior_nodes(int margin) const {
  std::vector<std::size_t> out;
  out.reserve(node_count_);
  for (std::size_t node = 0; node < node_count_; ++node) {
    const auto idx = unravel(node);
    bool keep = true;
    for (int a = 0; a < dim() && keep; ++a) {
      const int j = idx[a] - axes_[a].halo;
      const int m = axes_[a].mode == BoundaryMode::ghost ? margin : 0;
      keep = j >= m && j < axes_[a].count - m;
    }
    if (keep) out.push_back(node);
  }
  return out;
}

bool ChartGrid::same_layout(const ChartGrid& other) const {
  if (this == &other) return true;
  if (dim() != other.dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const auto& x = axes_[a];
    const auto& y = other.axes_[a];
    if (x.count != y.count || x.halo != y.halo || x.mode != y.mode || x.extent != y.extent ||
        x.origin != y.origin) {
      return false;
    }
  }
  return true;
}

std::vector<std::size_t> residual_nodes(const ChartGrid& grid, FdOrder p) {
  return grid.interior_nodes(2 * stencil_radius(p));
}

}  // namespace curvflow
