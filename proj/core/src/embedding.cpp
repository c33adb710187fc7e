#include "curvflow/embedding.hpp"

#include <algorithm>
#include <string>

#include "curvflow/curvature.hpp"
#include "curvflow/derivative.hpp"
#include "curvflow/errors.hpp"

namespace curvflow {

bool AmbientSignature::is_euclidean() const {
  return std::all_of(diag.begin(), diag.end(), [](int s) { return s == 1; });
}

EmbeddingField::EmbeddingField(TensorField x, AmbientSignature signature, bool riemannian)
    : x_(std::move(x)), signature_(std::move(signature)), riemannian_(riemannian) {
  if (x_.rank() != 0) throw ShapeError("embedding must be a rank-0 ambient-valued field");
  if (signature_.size() != x_.ambient()) {
    throw ShapeError("signature length " + std::to_string(signature_.size()) +
                     " does not match ambient dimension " + std::to_string(x_.ambient()));
  }
  if (signature_.size() < x_.dim()) {
    throw ConfigError("ambient dimension must be at least the chart dimension");
  }
  for (int s : signature_.diag) {
    if (s != 1 && s != -1) throw ConfigError("signature entries must be +1 or -1");
  }
}

void EmbeddingField::fill_halo() {
  if (!grid().has_ghost_axes()) return;
  const auto& provider = grid().boundary_provider();
  if (!provider) throw ConfigError("ghost-mode chart has no boundary provider attached");
  provider->fill_embedding(x_);
}

TensorField tangents(const EmbeddingField& e, FdOrder p) {
  const int n = e.grid().dim();
  const int amb = e.ambient_dim();
  TensorField xi = TensorField::covariant(e.grid_ptr(), 1, amb);
  for (int a = 0; a < n; ++a) {
    const TensorField d = partial_derivative(e.x(), a, p);
    for (std::size_t k = 0; k < d.node_count(); ++k) {
      std::copy_n(d.node(k).data(), amb, xi.node(k).data() + a * amb);
    }
  }
  return xi;
}

MetricField induced_metric_from_tangents(const TensorField& xi, const AmbientSignature& sig,
                                         bool riemannian) {
  const int n = xi.dim();
  const int amb = xi.ambient();
  TensorField g = TensorField::covariant(xi.grid_ptr(), 2);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const double* t = xi.node(k).data();
    double* o = g.node(k).data();
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double v = sig.dot(t + i * amb, t + j * amb);
        o[i * n + j] = v;
        o[j * n + i] = v;
      }
    }
  }
  try {
    return MetricField(std::move(g), riemannian);
  } catch (const DegenerateEmbeddingError&) {
    throw;
  } catch (const DegenerateMetricError& err) {
    throw DegenerateEmbeddingError(std::string("embedding degenerates: ") + err.what(),
                                   err.node());
  }
}

MetricField induced_metric(const EmbeddingField& e, FdOrder p) {
  return induced_metric_from_tangents(tangents(e, p), e.signature(), e.riemannian());
}

GaussTensorField gauss_tensor(const EmbeddingField& e, FdOrder p) {
  const MetricField m = induced_metric(e, p);
  return {covariant_hessian(e.x(), christoffel(m, p), p)};
}

TensorField ambient_product(const TensorField& a, const TensorField& b,
                            const AmbientSignature& sig) {
  if (a.ambient() != sig.size() || b.ambient() != sig.size()) {
    throw ShapeError("ambient_product: ambient dimension mismatch");
  }
  if (!a.grid().same_layout(b.grid())) throw ShapeError("ambient_product: grids differ");
  std::vector<Variance> var = a.variances();
  var.insert(var.end(), b.variances().begin(), b.variances().end());
  TensorField out(a.grid_ptr(), var);
  const int amb = sig.size();
  const std::size_t na = a.tensor_size();
  const std::size_t nb = b.tensor_size();
  for (std::size_t k = 0; k < out.node_count(); ++k) {
    const double* x = a.node(k).data();
    const double* y = b.node(k).data();
    double* o = out.node(k).data();
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) o[i * nb + j] = sig.dot(x + i * amb, y + j * amb);
    }
  }
  return out;
}

Norms tangency_residual(const EmbeddingField& e, const GaussTensorField& gauss, FdOrder p) {
  return norms(ambient_product(gauss.g, tangents(e, p), e.signature()),
               residual_nodes(e.grid(), p));
}

TensorField riemann_extrinsic(const GaussTensorField& gauss, const AmbientSignature& sig) {
  const TensorField& G = gauss.g;
  if (G.rank() != 2) throw ShapeError("riemann_extrinsic expects a rank-2 Gauss tensor");
  const int n = G.dim();
  const int amb = G.ambient();
  if (amb != sig.size()) throw ShapeError("riemann_extrinsic: signature mismatch");
  TensorField riem = TensorField::covariant(G.grid_ptr(), 4);
  std::vector<double> dots(static_cast<std::size_t>(n) * n * n * n);
  for (std::size_t k = 0; k < riem.node_count(); ++k) {
    const double* g = G.node(k).data();
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    // dots[(ab)(cd)] = G_ab . G_cd
    for (std::size_t ab = 0; ab < n2; ++ab) {
      for (std::size_t cd = ab; cd < n2; ++cd) {
        const double v = sig.dot(g + ab * amb, g + cd * amb);
        dots[ab * n2 + cd] = v;
        dots[cd * n2 + ab] = v;
      }
    }
    double* o = riem.node(k).data();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int kk = 0; kk < n; ++kk) {
          for (int l = 0; l < n; ++l) {
            o[((i * n + j) * n + kk) * n + l] = dots[(i * n + kk) * n2 + (j * n + l)] -
                                                dots[(i * n + l) * n2 + (j * n + kk)];
          }
        }
      }
    }
  }
  return riem;
}

TensorField metric_trace(const TensorField& t, const MetricField& m) {
  if (t.rank() != 2) throw ShapeError("metric_trace expects a rank-2 field");
  const int n = t.dim();
  const int amb = t.ambient();
  TensorField out = TensorField::scalar(t.grid_ptr(), amb);
  for (std::size_t k = 0; k < t.node_count(); ++k) {
    const double* gi = m.inverse().node(k).data();
    const double* x = t.node(k).data();
    double* o = out.node(k).data();
    for (int c = 0; c < amb; ++c) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) {
        acc += gi[a * n + a] * x[(a * n + a) * amb + c];
        for (int b = a + 1; b < n; ++b) {
          acc += gi[a * n + b] * (x[(a * n + b) * amb + c] + x[(b * n + a) * amb + c]);
        }
      }
      o[c] = acc;
    }
  }
  return out;
}

ExtrinsicGeometry extrinsic_geometry(const EmbeddingField& e, FdOrder p) {
  TensorField xi = tangents(e, p);
  MetricField m = induced_metric_from_tangents(xi, e.signature(), e.riemannian());
  TensorField gamma = christoffel(m, p);
  GaussTensorField gauss{covariant_hessian(e.x(), gamma, p)};
  TensorField lap = metric_trace(gauss.g, m);
  return {std::move(xi), std::move(m), std::move(gamma), std::move(gauss), std::move(lap)};
}

TensorField mean_curvature_vector(const EmbeddingField& e, FdOrder p) {
  const MetricField m = induced_metric(e, p);
  return metric_trace(covariant_hessian(e.x(), christoffel(m, p), p), m);
}

}  // namespace curvflow
