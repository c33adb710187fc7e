#include "curvflow/derivative.hpp"

#include <algorithm>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow {

std::vector<double> fd_weights(std::span<const int> offsets, int order) {
  const int n = static_cast<int>(offsets.size());
  // c[j][k]: weight of sample j for derivative k
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = offsets[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = static_cast<double>(offsets[i]) - offsets[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][order];
  return w;
}

namespace {

// Centered coefficients in paired form:
//   first:  sum_k a_k (f[j+k] - f[j-k]) / h
//   second: sum_k b_k (f[j+k] - 2 f[j] + f[j-k]) / h^2
// The paired form makes constants differentiate to exactly zero.
constexpr double kFirst2[] = {0.5};
constexpr double kFirst4[] = {2.0 / 3.0, -1.0 / 12.0};
constexpr double kSecond2[] = {1.0};
constexpr double kSecond4[] = {4.0 / 3.0, -1.0 / 12.0};

struct Row {
  bool centered = true;
  // centered: neighbor storage indices at +k and -k (already wrapped)
  std::vector<int> plus, minus;
  // one-sided: storage indices and weights
  std::vector<int> at;
  std::vector<double> w;
};

std::vector<Row> build_rows(const ChartGrid& grid, int axis, int deriv, FdOrder p) {
  const int ext = grid.extent(axis);
  const int s = stencil_radius(p);
  const bool periodic = grid.mode(axis) == BoundaryMode::periodic;
  std::vector<Row> rows(ext);
  for (int j = 0; j < ext; ++j) {
    Row& row = rows[j];
    if (periodic || (j - s >= 0 && j + s < ext)) {
      for (int k = 1; k <= s; ++k) {
        row.plus.push_back(periodic ? (j + k) % ext : j + k);
        row.minus.push_back(periodic ? (j - k + ext) % ext : j - k);
      }
      continue;
    }
    // One-sided window of the same order, shifted to fit in storage.
    row.centered = false;
    const int width = static_cast<int>(p) + deriv;
    int lo = std::clamp(j - s, 0, ext - width);
    std::vector<int> offsets(width);
    for (int q = 0; q < width; ++q) {
      offsets[q] = lo + q - j;
      row.at.push_back(lo + q);
    }
    row.w = fd_weights(offsets, deriv);
  }
  return rows;
}

}  // namespace

void apply_axis_derivative(const ChartGrid& grid, std::span<const double> in,
                           std::span<double> out, std::size_t comps, int axis, int deriv,
                           FdOrder p) {
  if (axis < 0 || axis >= grid.dim()) {
    throw ShapeError("derivative axis " + std::to_string(axis) + " out of range");
  }
  if (grid.mode(axis) == BoundaryMode::ghost && !grid.boundary_provider()) {
    throw ConfigError("ghost-mode axis " + std::to_string(axis) +
                      " has no boundary provider attached");
  }
  const auto rows = build_rows(grid, axis, deriv, p);
  const double h = grid.spacing(axis);
  const double scale = deriv == 1 ? 1.0 / h : 1.0 / (h * h);
  const std::span<const double> coef =
      deriv == 1 ? (p == FdOrder::second ? std::span<const double>(kFirst2)
                                         : std::span<const double>(kFirst4))
                 : (p == FdOrder::second ? std::span<const double>(kSecond2)
                                         : std::span<const double>(kSecond4));

  const int ext = grid.extent(axis);
  const std::size_t block = grid.stride(axis) * comps;
  const std::size_t outer = grid.node_count() / (grid.stride(axis) * ext);

  for (std::size_t o = 0; o < outer; ++o) {
    const double* base = in.data() + o * ext * block;
    double* obase = out.data() + o * ext * block;
    for (int j = 0; j < ext; ++j) {
      double* dst = obase + j * block;
      const Row& row = rows[j];
      std::fill(dst, dst + block, 0.0);
      if (row.centered) {
        const double* mid = base + j * block;
        for (std::size_t k = 0; k < row.plus.size(); ++k) {
          const double* fp = base + row.plus[k] * block;
          const double* fm = base + row.minus[k] * block;
          const double c = coef[k] * scale;
          if (deriv == 1) {
            for (std::size_t i = 0; i < block; ++i) dst[i] += c * (fp[i] - fm[i]);
          } else {
            for (std::size_t i = 0; i < block; ++i) dst[i] += c * ((fp[i] - 2.0 * mid[i]) + fm[i]);
          }
        }
      } else {
        for (std::size_t q = 0; q < row.at.size(); ++q) {
          const double* f = base + row.at[q] * block;
          const double c = row.w[q] * scale;
          for (std::size_t i = 0; i < block; ++i) dst[i] += c * f[i];
        }
      }
    }
  }
}

TensorField partial_derivative(const TensorField& f, int axis, FdOrder p) {
  TensorField out(f.grid_ptr(), f.variances(), f.ambient());
  apply_axis_derivative(f.grid(), f.data(), out.data(), f.node_size(), axis, 1, p);
  return out;
}

TensorField second_partial(const TensorField& f, int a, int b, FdOrder p) {
  TensorField out(f.grid_ptr(), f.variances(), f.ambient());
  if (a == b) {
    apply_axis_derivative(f.grid(), f.data(), out.data(), f.node_size(), a, 2, p);
    return out;
  }
  // Tensor-product stencils commute, so the order of composition is immaterial
  // on periodic axes; fix it to make the result reproducible everywhere.
  const int first = std::max(a, b);
  const int second = std::min(a, b);
  TensorField tmp = partial_derivative(f, first, p);
  apply_axis_derivative(f.grid(), tmp.data(), out.data(), f.node_size(), second, 1, p);
  return out;
}

}  // namespace curvflow
