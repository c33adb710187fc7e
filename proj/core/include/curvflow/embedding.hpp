#pragma once

#include <vector>

#include "curvflow/metric.hpp"
#include "curvflow/tensor_field.hpp"

namespace curvflow {

/// Diagonal signature eta_AB of the flat ambient space.
struct AmbientSignature {
  std::vector<int> diag;

  static AmbientSignature euclidean(int n) { return {std::vector<int>(n, 1)}; }
  int size() const { return static_cast<int>(diag.size()); }
  bool is_euclidean() const;
  double dot(const double* a, const double* b) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) acc += diag[i] * a[i] * b[i];
    return acc;
  }
};

/// Ambient coordinates X^A sampled on a chart grid.
class EmbeddingField {
 public:
  EmbeddingField(TensorField x, AmbientSignature signature, bool riemannian = true);

  const TensorField& x() const { return x_; }
  TensorField& x() { return x_; }
  const AmbientSignature& signature() const { return signature_; }
  bool riemannian() const { return riemannian_; }
  const GridPtr& grid_ptr() const { return x_.grid_ptr(); }
  const ChartGrid& grid() const { return x_.grid(); }
  int ambient_dim() const { return x_.ambient(); }

  /// Refreshes halo values through the grid's boundary provider (no-op on
  /// fully periodic charts).
  void fill_halo();

 private:
  TensorField x_;
  AmbientSignature signature_;
  bool riemannian_;
};

/// Ambient-valued, symmetric rank-2 covariant field nabla_i nabla_j X.
struct GaussTensorField {
  TensorField g;
};

/// X_i = dX/dx^i (ambient-valued covector).
TensorField tangents(const EmbeddingField& e, FdOrder p);

/// g_ij = eta_AB X^A_i X^B_j. Rank loss raises DegenerateEmbeddingError.
MetricField induced_metric(const EmbeddingField& e, FdOrder p);
MetricField induced_metric_from_tangents(const TensorField& xi, const AmbientSignature& sig,
                                         bool riemannian);

/// nabla_ij X = X_ij - Gamma^k_ij X_k with Gamma from the induced metric.
GaussTensorField gauss_tensor(const EmbeddingField& e, FdOrder p);

/// || nabla_ij X . X_k || over the residual mask.
Norms tangency_residual(const EmbeddingField& e, const GaussTensorField& gauss, FdOrder p);

/// R_ijkl = nabla_ik X . nabla_jl X - nabla_il X . nabla_jk X.
TensorField riemann_extrinsic(const GaussTensorField& gauss, const AmbientSignature& sig);

/// Laplace-Beltrami of the embedding, g^ij nabla_ij X.
TensorField mean_curvature_vector(const EmbeddingField& e, FdOrder p);

/// Everything derived from one embedding snapshot.
struct ExtrinsicGeometry {
  TensorField tangents;
  MetricField metric;
  TensorField christoffel;
  GaussTensorField gauss;
  TensorField mean_curvature;
};

ExtrinsicGeometry extrinsic_geometry(const EmbeddingField& e, FdOrder p);

/// Trace of an ambient-valued rank-2 tensor with g^ij.
TensorField metric_trace(const TensorField& t, const MetricField& m);

/// Nodewise eta-inner product of two ambient-valued tensors, contracting the
/// ambient index only; the output has the tensor slots of a followed by b.
TensorField ambient_product(const TensorField& a, const TensorField& b,
                            const AmbientSignature& sig);

}  // namespace curvflow
