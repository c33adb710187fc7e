#include "curvflow/tensor_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow {

TensorField::TensorField(GridPtr grid, std::vector<Variance> variances, int ambient)
    : grid_(std::move(grid)), variances_(std::move(variances)), ambient_(ambient) {
  if (!grid_) throw ShapeError("tensor field needs a grid");
  if (ambient_ < 1) throw ShapeError("ambient multiplicity must be positive");
  tensor_size_ = 1;
  for (std::size_t r = 0; r < variances_.size(); ++r) tensor_size_ *= grid_->dim();
  data_.assign(grid_->node_count() * node_size(), 0.0);
}

std::size_t TensorField::index(std::initializer_list<int> idx, int amb) const {
  if (static_cast<int>(idx.size()) != rank()) {
    throw ShapeError("index of length " + std::to_string(idx.size()) + " for rank " +
                     std::to_string(rank()));
  }
  std::size_t flat = 0;
  for (int i : idx) flat = flat * dim() + i;
  return flat * ambient_ + amb;
}

void TensorField::symmetrize(int a, int b) {
  if (a == b || a < 0 || b < 0 || a >= rank() || b >= rank()) {
    throw ShapeError("invalid symmetry slots");
  }
  if (variances_[a] != variances_[b]) throw ShapeError("cannot symmetrize mixed variances");
  const MultiIndexTable table(dim(), rank());
  const std::size_t nn = node_count();
  for (std::size_t k = 0; k < nn; ++k) {
    auto v = node(k);
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      const int ia = table.digit(flat, a);
      const int ib = table.digit(flat, b);
      if (ia >= ib) continue;
      const std::size_t other = table.replace(table.replace(flat, a, ib), b, ia);
      for (int c = 0; c < ambient_; ++c) {
        double& x = v[flat * ambient_ + c];
        double& y = v[other * ambient_ + c];
        const double m = 0.5 * (x + y);
        x = m;
        y = m;
      }
    }
  }
  symmetries_.emplace_back(std::min(a, b), std::max(a, b));
}

bool TensorField::same_shape(const TensorField& o) const {
  return grid_ && o.grid_ && grid_->same_layout(*o.grid_) && variances_ == o.variances_ &&
         ambient_ == o.ambient_;
}

void require_same_shape(const TensorField& a, const TensorField& b, const char* op) {
  if (!a.same_shape(b)) throw ShapeError(std::string(op) + ": operand shapes differ");
}

TensorField& TensorField::operator+=(const TensorField& o) {
  require_same_shape(*this, o, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  require_same_shape(*this, o, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

TensorField& TensorField::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

void TensorField::axpy(double s, const TensorField& o) {
  require_same_shape(*this, o, "axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
}

TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
TensorField operator*(double s, TensorField a) { return a *= s; }

MultiIndexTable::MultiIndexTable(int n, int rank) : n_(n), rank_(rank), size_(1) {
  for (int r = 0; r < rank; ++r) size_ *= n;
  place_.assign(rank, 1);
  for (int s = rank - 2; s >= 0; --s) place_[s] = place_[s + 1] * n;
  digits_.resize(size_ * rank);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    std::size_t rem = flat;
    for (int s = 0; s < rank; ++s) {
      digits_[flat * rank + s] = static_cast<int>(rem / place_[s]);
      rem %= place_[s];
    }
  }
}

Norms norms(const TensorField& f, std::span<const std::size_t> nodes) {
  Norms out;
  out.nodes = nodes.size();
  double sum = 0.0;
  for (std::size_t k : nodes) {
    double sq = 0.0;
    for (double x : f.node(k)) {
      out.linf = std::max(out.linf, std::abs(x));
      sq += x * x;
    }
    sum += sq;
  }
  out.l2 = nodes.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(nodes.size()));
  return out;
}

Norms norms(const TensorField& f) {
  const auto nodes = f.grid().band_nodes();
  return norms(f, nodes);
}

}  // namespace curvflow
