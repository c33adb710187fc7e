#include "curvflow/metric.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

std::string node_label(const ChartGrid& grid, std::size_t node) {
  const auto idx = grid.unravel(node);
  std::string s = "node " + std::to_string(node) + " (";
  for (int a = 0; a < grid.dim(); ++a) {
    if (a) s += ", ";
    s += std::to_string(idx[a] - grid.halo(a));
  }
  return s + ")";
}

// Leading principal minors of a symmetric matrix stored row-major.
bool positive_definite_small(const double* g, int n) {
  if (g[0] <= 0.0) return false;
  if (n == 1) return true;
  const double m2 = g[0] * g[n + 1] - g[1] * g[n];
  if (m2 <= 0.0) return false;
  if (n == 2) return true;
  const double m3 = g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) +
                    g[2] * (g[3] * g[7] - g[4] * g[6]);
  return m3 > 0.0;
}

using DynMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

MetricField::MetricField(TensorField g, bool riemannian)
    : g_(std::move(g)), riemannian_(riemannian) {
  if (g_.rank() != 2 || g_.ambient() != 1 || g_.variances()[0] != Variance::covariant ||
      g_.variances()[1] != Variance::covariant) {
    throw ShapeError("metric must be a rank-2 covariant scalar-valued field");
  }
  g_.symmetrize(0, 1);
  const int n = g_.dim();
  g_inv_ = TensorField(g_.grid_ptr(), {Variance::contravariant, Variance::contravariant});
  det_.assign(g_.node_count(), 0.0);

  for (std::size_t k = 0; k < g_.node_count(); ++k) {
    const double* a = g_.node(k).data();
    double* inv = g_inv_.node(k).data();
    double scale = 0.0;
    for (int i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(a[i]));
    double det = 0.0;
    bool pd = true;
    if (n == 1) {
      det = a[0];
      if (det != 0.0) inv[0] = 1.0 / det;
      pd = a[0] > 0.0;
    } else if (n == 2) {
      det = a[0] * a[3] - a[1] * a[2];
      if (det != 0.0) {
        inv[0] = a[3] / det;
        inv[3] = a[0] / det;
        inv[1] = inv[2] = -a[1] / det;
      }
      pd = positive_definite_small(a, 2);
    } else if (n == 3) {
      const double c00 = a[4] * a[8] - a[5] * a[7];
      const double c01 = a[5] * a[6] - a[3] * a[8];
      const double c02 = a[3] * a[7] - a[4] * a[6];
      det = a[0] * c00 + a[1] * c01 + a[2] * c02;
      if (det != 0.0) {
        const double c11 = a[0] * a[8] - a[2] * a[6];
        const double c12 = a[1] * a[6] - a[0] * a[7];
        const double c22 = a[0] * a[4] - a[1] * a[3];
        inv[0] = c00 / det;
        inv[4] = c11 / det;
        inv[8] = c22 / det;
        inv[1] = inv[3] = c01 / det;
        inv[2] = inv[6] = c02 / det;
        inv[5] = inv[7] = c12 / det;
      }
      pd = positive_definite_small(a, 3);
    } else {
      Eigen::Map<const DynMat> gm(a, n, n);
      Eigen::PartialPivLU<DynMat> lu(gm);
      det = lu.determinant();
      if (det != 0.0) {
        DynMat gi = lu.inverse();
        gi = 0.5 * (gi + gi.transpose()).eval();
        std::copy(gi.data(), gi.data() + n * n, inv);
      }
      pd = Eigen::LLT<DynMat>(gm).info() == Eigen::Success;
    }
    det_[k] = det;
    if (!std::isfinite(det) || std::abs(det) <= 1e-13 * std::pow(scale, n) || scale == 0.0) {
      throw DegenerateMetricError("singular metric at " + node_label(g_.grid(), k), k);
    }
    if (riemannian_ && !pd) {
      throw DegenerateMetricError("metric not positive-definite at " + node_label(g_.grid(), k),
                                  k);
    }
  }
}

double min_eigenvalue(const MetricField& m, std::span<const std::size_t> nodes) {
  const int n = m.dim();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k : nodes) {
    Eigen::Map<const DynMat> gm(m.g().node(k).data(), n, n);
    Eigen::SelfAdjointEigenSolver<DynMat> es(gm, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

double max_inverse_eigenvalue(const MetricField& m, std::span<const std::size_t> nodes) {
  const int n = m.dim();
  double hi = 0.0;
  for (std::size_t k : nodes) {
    Eigen::Map<const DynMat> gi(m.inverse().node(k).data(), n, n);
    Eigen::SelfAdjointEigenSolver<DynMat> es(gi, Eigen::EigenvaluesOnly);
    hi = std::max(hi, es.eigenvalues()(n - 1));
  }
  return hi;
}

namespace {

TensorField contract_slot(const TensorField& t, const TensorField& mat, int slot, Variance to) {
  if (slot < 0 || slot >= t.rank()) throw ShapeError("index slot out of range");
  if (!t.grid().same_layout(mat.grid())) throw ShapeError("metric and tensor grids differ");
  auto var = t.variances();
  var[slot] = to;
  TensorField out(t.grid_ptr(), var, t.ambient());
  const int n = t.dim();
  const int amb = t.ambient();
  const MultiIndexTable table(n, t.rank());
  for (std::size_t k = 0; k < t.node_count(); ++k) {
    const double* in = t.node(k).data();
    const double* g = mat.node(k).data();
    double* o = out.node(k).data();
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      const int i = table.digit(flat, slot);
      for (int c = 0; c < amb; ++c) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) acc += g[i * n + m] * in[table.replace(flat, slot, m) * amb + c];
        o[flat * amb + c] = acc;
      }
    }
  }
  return out;
}

}  // namespace

TensorField lower_index(const TensorField& t, const MetricField& m, int slot) {
  if (t.variances().at(slot) != Variance::contravariant) {
    throw ShapeError("lower_index: slot is already covariant");
  }
  return contract_slot(t, m.g(), slot, Variance::covariant);
}

TensorField raise_index(const TensorField& t, const MetricField& m, int slot) {
  if (t.variances().at(slot) != Variance::covariant) {
    throw ShapeError("raise_index: slot is already contravariant");
  }
  return contract_slot(t, m.inverse(), slot, Variance::contravariant);
}

}  // namespace curvflow
