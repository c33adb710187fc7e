#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "curvflow/grid.hpp"

namespace curvflow {

enum class Variance : std::uint8_t { covariant, contravariant };

/// Grid-sampled tensor with declared index variances. Each tensor component
/// may carry several ambient components, which covariant operations treat as
/// independent scalars (embedding coordinates, Gauss tensor, ...).
///
/// Layout: node-major; inside a node the first tensor index varies slowest and
/// the ambient component fastest.
class TensorField {
 public:
  TensorField() = default;
  TensorField(GridPtr grid, std::vector<Variance> variances, int ambient = 1);

  static TensorField scalar(GridPtr grid, int ambient = 1) {
    return TensorField(std::move(grid), {}, ambient);
  }
  static TensorField covariant(GridPtr grid, int rank, int ambient = 1) {
    return TensorField(std::move(grid), std::vector<Variance>(rank, Variance::covariant), ambient);
  }

  const GridPtr& grid_ptr() const { return grid_; }
  const ChartGrid& grid() const { return *grid_; }
  int dim() const { return grid_->dim(); }
  int rank() const { return static_cast<int>(variances_.size()); }
  int ambient() const { return ambient_; }
  std::size_t tensor_size() const { return tensor_size_; }
  std::size_t node_size() const { return tensor_size_ * ambient_; }
  std::size_t node_count() const { return grid_->node_count(); }
  const std::vector<Variance>& variances() const { return variances_; }

  std::span<double> node(std::size_t k) { return {data_.data() + k * node_size(), node_size()}; }
  std::span<const double> node(std::size_t k) const {
    return {data_.data() + k * node_size(), node_size()};
  }
  double& operator()(std::size_t node, std::size_t comp) { return data_[node * node_size() + comp]; }
  double operator()(std::size_t node, std::size_t comp) const {
    return data_[node * node_size() + comp];
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Flat in-node offset of a tensor multi-index and ambient component.
  std::size_t index(std::initializer_list<int> idx, int amb = 0) const;

  /// Averages over the swap of index slots a and b and records the tag.
  void symmetrize(int a, int b);
  const std::vector<std::pair<int, int>>& symmetries() const { return symmetries_; }

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);
  /// this += s * o
  void axpy(double s, const TensorField& o);

  bool same_shape(const TensorField& o) const;

 private:
  GridPtr grid_;
  std::vector<Variance> variances_;
  int ambient_ = 1;
  std::size_t tensor_size_ = 1;
  std::vector<double> data_;
  std::vector<std::pair<int, int>> symmetries_;
};

TensorField operator-(TensorField a, const TensorField& b);
TensorField operator+(TensorField a, const TensorField& b);
TensorField operator*(double s, TensorField a);

void require_same_shape(const TensorField& a, const TensorField& b, const char* op);

/// Digits of every flat multi-index for a rank-r tensor in n dimensions.
class MultiIndexTable {
 public:
  MultiIndexTable(int n, int rank);
  int n() const { return n_; }
  int rank() const { return rank_; }
  std::size_t size() const { return size_; }
  int digit(std::size_t flat, int slot) const { return digits_[flat * rank_ + slot]; }
  /// Flat index after replacing the digit in `slot` by `value`.
  std::size_t replace(std::size_t flat, int slot, int value) const {
    return flat + (static_cast<std::ptrdiff_t>(value) - digit(flat, slot)) *
                      static_cast<std::ptrdiff_t>(place_[slot]);
  }
  std::size_t place(int slot) const { return place_[slot]; }

 private:
  int n_;
  int rank_;
  std::size_t size_;
  std::vector<int> digits_;
  std::vector<std::size_t> place_;
};

/// L-infinity over components and nodes, and the cell-weighted RMS of the
/// per-node Euclidean norm. Cells are uniform, so the weighting reduces to a
/// mean over the selected nodes.
struct Norms {
  double linf = 0.0;
  double l2 = 0.0;
  std::size_t nodes = 0;
};

Norms norms(const TensorField& f, std::span<const std::size_t> nodes);
/// Norms over all band nodes.
Norms norms(const TensorField& f);

}  // namespace curvflow
