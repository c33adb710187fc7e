#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace curvflow {

class TensorField;

inline constexpr int kMaxDim = 6;

enum class BoundaryMode { periodic, ghost };

/// Central-difference order. Ghost axes fall back to one-sided stencils of the
/// same order at the edge of storage.
enum class FdOrder : int { second = 2, fourth = 4 };

inline int stencil_radius(FdOrder p) { return static_cast<int>(p) / 2; }

struct AxisSpec {
  int count = 0;
  /// Period for periodic axes, covered band length for ghost axes.
  double extent = 0.0;
  /// Chart coordinate of the first non-halo node.
  double origin = 0.0;
  BoundaryMode mode = BoundaryMode::periodic;
  /// Ghost nodes stored on each side of a ghost axis.
  int halo = 0;
};

/// Supplies halo values on ghost axes. Implementations overwrite every node
/// that lies outside the band and leave band nodes untouched.
class BoundaryProvider {
 public:
  virtual ~BoundaryProvider() = default;
  virtual void fill_embedding(TensorField& x) const = 0;
  virtual void fill_metric(TensorField& g) const = 0;
};

using NodeIndex = std::array<int, kMaxDim>;

/// Structured sampling of a coordinate chart. Storage covers the band plus the
/// halo of every ghost axis; nodes are laid out row-major, last axis fastest.
class ChartGrid {
 public:
  explicit ChartGrid(std::vector<AxisSpec> axes,
                     std::shared_ptr<const BoundaryProvider> provider = nullptr);

  int dim() const { return static_cast<int>(axes_.size()); }
  const AxisSpec& axis(int a) const { return axes_[a]; }
  int count(int a) const { return axes_[a].count; }
  int halo(int a) const { return axes_[a].halo; }
  /// Stored nodes along an axis (count + 2 * halo).
  int extent(int a) const { return extents_[a]; }
  double spacing(int a) const { return spacing_[a]; }
  BoundaryMode mode(int a) const { return axes_[a].mode; }
  bool has_ghost_axes() const;

  /// Chart coordinate of storage index j along axis a.
  double coordinate(int a, int j) const {
    return axes_[a].origin + (j - axes_[a].halo) * spacing_[a];
  }

  std::size_t node_count() const { return node_count_; }
  std::size_t stride(int a) const { return strides_[a]; }

  NodeIndex unravel(std::size_t node) const;
  std::size_t ravel(const NodeIndex& idx) const;

  /// True when the node lies in the band (not in any halo).
  bool in_band(std::size_t node) const;
  /// Band nodes at distance >= margin from the halo on every ghost axis.
  std::vector<std::size_t> interior_nodes(int margin) const;
  std::vector<std::size_t> band_nodes() const { return interior_nodes(0); }

  const std::shared_ptr<const BoundaryProvider>& boundary_provider() const {
    return provider_;
  }

  bool same_layout(const ChartGrid& other) const;

 private:
  std::vector<AxisSpec> axes_;
  std::vector<int> extents_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t node_count_ = 0;
  std::shared_ptr<const BoundaryProvider> provider_;
};

using GridPtr = std::shared_ptr<const ChartGrid>;

/// Default residual mask: band nodes with a two-stencil margin on ghost axes.
std::vector<std::size_t> residual_nodes(const ChartGrid& grid, FdOrder p);

}  // namespace curvflow
