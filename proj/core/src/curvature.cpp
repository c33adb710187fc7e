#include "curvflow/curvature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "curvflow/derivative.hpp"
#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

void require_christoffel(const TensorField& t, const TensorField& gamma) {
  if (gamma.rank() != 3 || gamma.ambient() != 1 ||
      gamma.variances()[0] != Variance::contravariant) {
    throw ShapeError("expected a Christoffel field Gamma^k_ij");
  }
  if (!t.grid().same_layout(gamma.grid())) {
    throw ShapeError("tensor and Christoffel field live on different grids");
  }
}

std::size_t ipow(int n, int r) {
  std::size_t s = 1;
  for (int i = 0; i < r; ++i) s *= n;
  return s;
}

}  // namespace

TensorField christoffel(const MetricField& m, FdOrder p) {
  const int n = m.dim();
  std::vector<TensorField> dg;
  dg.reserve(n);
  for (int a = 0; a < n; ++a) dg.push_back(partial_derivative(m.g(), a, p));

  TensorField gamma(m.grid_ptr(), {Variance::contravariant, Variance::covariant,
                                   Variance::covariant});
  std::array<double, kMaxDim * kMaxDim * kMaxDim> first{};
  for (std::size_t k = 0; k < gamma.node_count(); ++k) {
    // first-kind symbols Gamma_{l,ij}
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          first[(l * n + i) * n + j] =
              0.5 * (dg[i](k, j * n + l) + dg[j](k, i * n + l) - dg[l](k, i * n + j));
        }
      }
    }
    const double* gi = m.inverse().node(k).data();
    double* out = gamma.node(k).data();
    for (int c = 0; c < n; ++c) {
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          double acc = 0.0;
          for (int l = 0; l < n; ++l) acc += gi[c * n + l] * first[(l * n + i) * n + j];
          out[(c * n + i) * n + j] = acc;
          out[(c * n + j) * n + i] = acc;
        }
      }
    }
  }
  return gamma;
}

TensorField covariant_derivative(const TensorField& t, const TensorField& gamma, FdOrder p) {
  require_christoffel(t, gamma);
  const int n = t.dim();
  const int r = t.rank();
  const int amb = t.ambient();
  std::vector<Variance> var{Variance::covariant};
  var.insert(var.end(), t.variances().begin(), t.variances().end());
  TensorField out(t.grid_ptr(), var, amb);

  const std::size_t in_size = t.node_size();
  for (int a = 0; a < n; ++a) {
    const TensorField d = partial_derivative(t, a, p);
    for (std::size_t k = 0; k < t.node_count(); ++k) {
      std::copy_n(d.node(k).data(), in_size, out.node(k).data() + a * in_size);
    }
  }
  if (r == 0) return out;

  const MultiIndexTable table(n, r);
  for (std::size_t k = 0; k < t.node_count(); ++k) {
    const double* g = gamma.node(k).data();
    const double* in = t.node(k).data();
    double* o = out.node(k).data();
    for (int a = 0; a < n; ++a) {
      for (std::size_t flat = 0; flat < table.size(); ++flat) {
        for (int s = 0; s < r; ++s) {
          const int idx = table.digit(flat, s);
          const bool cov = t.variances()[s] == Variance::covariant;
          for (int mm = 0; mm < n; ++mm) {
            // covariant: -Gamma^m_{a idx} T_{..m..}; contravariant: +Gamma^idx_{a m} T^{..m..}
            const double gcoef = cov ? -g[(mm * n + a) * n + idx] : g[(idx * n + a) * n + mm];
            if (gcoef == 0.0) continue;
            const std::size_t src = table.replace(flat, s, mm) * amb;
            double* dst = o + a * in_size + flat * amb;
            for (int c = 0; c < amb; ++c) dst[c] += gcoef * in[src + c];
          }
        }
      }
    }
  }
  return out;
}

TensorField covariant_hessian(const TensorField& f, const TensorField& gamma, FdOrder p) {
  require_christoffel(f, gamma);
  if (f.rank() != 0) throw ShapeError("covariant_hessian expects a rank-0 field");
  const int n = f.dim();
  const int amb = f.ambient();
  std::vector<TensorField> d;
  d.reserve(n);
  for (int a = 0; a < n; ++a) d.push_back(partial_derivative(f, a, p));

  TensorField out = TensorField::covariant(f.grid_ptr(), 2, amb);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const TensorField s = second_partial(f, a, b, p);
      for (std::size_t k = 0; k < f.node_count(); ++k) {
        const double* g = gamma.node(k).data();
        double* o = out.node(k).data();
        for (int c = 0; c < amb; ++c) {
          double v = s(k, c);
          for (int mm = 0; mm < n; ++mm) v -= g[(mm * n + a) * n + b] * d[mm](k, c);
          o[(a * n + b) * amb + c] = v;
          o[(b * n + a) * amb + c] = v;
        }
      }
    }
  }
  return out;
}

TensorField laplace_beltrami(const TensorField& f, const MetricField& m,
                             const TensorField& gamma, FdOrder p) {
  const TensorField h = covariant_hessian(f, gamma, p);
  const int n = f.dim();
  const int amb = f.ambient();
  TensorField out = TensorField::scalar(f.grid_ptr(), amb);
  for (std::size_t k = 0; k < f.node_count(); ++k) {
    const double* gi = m.inverse().node(k).data();
    const double* hk = h.node(k).data();
    double* o = out.node(k).data();
    for (int c = 0; c < amb; ++c) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) {
        acc += gi[a * n + a] * hk[(a * n + a) * amb + c];
        for (int b = a + 1; b < n; ++b) acc += 2.0 * gi[a * n + b] * hk[(a * n + b) * amb + c];
      }
      o[c] = acc;
    }
  }
  return out;
}

TensorField laplace_beltrami(const TensorField& f, const MetricField& m, FdOrder p) {
  return laplace_beltrami(f, m, christoffel(m, p), p);
}

TensorField covariant_laplacian(const TensorField& t, const MetricField& m,
                                const TensorField& gamma, FdOrder p) {
  require_christoffel(t, gamma);
  const int n = t.dim();
  const int r = t.rank();
  const int amb = t.ambient();
  const TensorField d = covariant_derivative(t, gamma, p);
  const std::size_t in_size = t.node_size();
  TensorField out(t.grid_ptr(), t.variances(), amb);

  // g^ab d_a D_{bI}
  for (int a = 0; a < n; ++a) {
    const TensorField pa = partial_derivative(d, a, p);
    for (std::size_t k = 0; k < t.node_count(); ++k) {
      const double* gi = m.inverse().node(k).data();
      const double* src = pa.node(k).data();
      double* o = out.node(k).data();
      for (int b = 0; b < n; ++b) {
        const double w = gi[a * n + b];
        const double* row = src + b * in_size;
        for (std::size_t q = 0; q < in_size; ++q) o[q] += w * row[q];
      }
    }
  }

  // Connection terms of nabla_a acting on D_{bI}, contracted with g^ab.
  const MultiIndexTable table(n, r);
  std::vector<double> trace(n);
  std::vector<double> mix(static_cast<std::size_t>(n) * n * n);  // M^b_{m i} = g^ab Gamma^m_ai
  for (std::size_t k = 0; k < t.node_count(); ++k) {
    const double* gi = m.inverse().node(k).data();
    const double* g = gamma.node(k).data();
    const double* dk = d.node(k).data();
    double* o = out.node(k).data();
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) acc += gi[a * n + b] * g[(c * n + a) * n + b];
      }
      trace[c] = acc;
    }
    for (int b = 0; b < n; ++b) {
      for (int mm = 0; mm < n; ++mm) {
        for (int i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int a = 0; a < n; ++a) acc += gi[a * n + b] * g[(mm * n + a) * n + i];
          mix[(b * n + mm) * n + i] = acc;
        }
      }
    }
    for (int c = 0; c < n; ++c) {
      const double w = trace[c];
      const double* row = dk + c * in_size;
      for (std::size_t q = 0; q < in_size; ++q) o[q] -= w * row[q];
    }
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      for (int s = 0; s < r; ++s) {
        const int idx = table.digit(flat, s);
        const bool cov = t.variances()[s] == Variance::covariant;
        for (int b = 0; b < n; ++b) {
          for (int mm = 0; mm < n; ++mm) {
            // covariant: -g^ab Gamma^m_{a idx}; contravariant: +g^ab Gamma^idx_{a m}
            const double coef =
                cov ? -mix[(b * n + mm) * n + idx] : mix[(b * n + idx) * n + mm];
            const std::size_t src = b * in_size + table.replace(flat, s, mm) * amb;
            for (int c = 0; c < amb; ++c) o[flat * amb + c] += coef * dk[src + c];
          }
        }
      }
    }
  }
  return out;
}

TensorField riemann_covariant(const MetricField& m, const TensorField& gamma, FdOrder p) {
  require_christoffel(m.g(), gamma);
  const int n = m.dim();
  // d2[a][b] for a <= b
  std::vector<TensorField> d2(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) d2[a * n + b] = second_partial(m.g(), a, b, p);
  }
  auto dd = [&](int a, int b, std::size_t k, int i, int j) {
    const TensorField& f = a <= b ? d2[a * n + b] : d2[b * n + a];
    return f(k, i * n + j);
  };

  TensorField riem = TensorField::covariant(m.grid_ptr(), 4);
  std::vector<double> low(static_cast<std::size_t>(n) * n * n);
  for (std::size_t k = 0; k < riem.node_count(); ++k) {
    const double* g = m.g().node(k).data();
    const double* gm = gamma.node(k).data();
    for (int mm = 0; mm < n; ++mm) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int q = 0; q < n; ++q) acc += g[mm * n + q] * gm[(q * n + i) * n + j];
          low[(mm * n + i) * n + j] = acc;
        }
      }
    }
    double* o = riem.node(k).data();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int kk = 0; kk < n; ++kk) {
          for (int l = 0; l < n; ++l) {
            double v = 0.5 * (dd(i, l, k, j, kk) + dd(j, kk, k, i, l) - dd(i, kk, k, j, l) -
                              dd(j, l, k, i, kk));
            for (int mm = 0; mm < n; ++mm) {
              v += gm[(mm * n + i) * n + l] * low[(mm * n + j) * n + kk] -
                   gm[(mm * n + i) * n + kk] * low[(mm * n + j) * n + l];
            }
            o[((i * n + j) * n + kk) * n + l] = v;
          }
        }
      }
    }
  }
  return riem;
}

TensorField riemann_covariant(const MetricField& m, FdOrder p) {
  return riemann_covariant(m, christoffel(m, p), p);
}

TensorField riemann_mixed(const MetricField& m, const TensorField& gamma, FdOrder p) {
  require_christoffel(m.g(), gamma);
  const int n = m.dim();
  std::vector<TensorField> dgam;
  dgam.reserve(n);
  for (int a = 0; a < n; ++a) dgam.push_back(partial_derivative(gamma, a, p));
  TensorField out(m.grid_ptr(), {Variance::contravariant, Variance::covariant,
                                 Variance::covariant, Variance::covariant});
  auto G = [n](const double* g, int a, int b, int c) { return g[(a * n + b) * n + c]; };
  for (std::size_t k = 0; k < out.node_count(); ++k) {
    const double* g = gamma.node(k).data();
    double* o = out.node(k).data();
    for (int kk = 0; kk < n; ++kk) {
      for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            double v = dgam[i](k, (kk * n + j) * n + l) - dgam[j](k, (kk * n + i) * n + l);
            for (int mm = 0; mm < n; ++mm) {
              v += G(g, kk, i, mm) * G(g, mm, j, l) - G(g, kk, j, mm) * G(g, mm, i, l);
            }
            o[((kk * n + l) * n + i) * n + j] = v;
          }
        }
      }
    }
  }
  return out;
}

std::pair<TensorField, TensorField> ricci_and_scalar(const TensorField& riem,
                                                     const MetricField& m) {
  if (riem.rank() != 4 || riem.ambient() != 1 ||
      std::any_of(riem.variances().begin(), riem.variances().end(),
                  [](Variance v) { return v != Variance::covariant; })) {
    throw ShapeError("ricci_and_scalar expects a fully covariant Riemann tensor");
  }
  if (!riem.grid().same_layout(m.grid())) throw ShapeError("Riemann and metric grids differ");
  const int n = m.dim();
  TensorField ric = TensorField::covariant(m.grid_ptr(), 2);
  TensorField scal = TensorField::scalar(m.grid_ptr());
  for (std::size_t k = 0; k < ric.node_count(); ++k) {
    const double* gi = m.inverse().node(k).data();
    const double* r = riem.node(k).data();
    double* o = ric.node(k).data();
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int kk = 0; kk < n; ++kk) {
            acc += gi[i * n + kk] * r[((i * n + j) * n + kk) * n + l];
          }
        }
        o[j * n + l] = acc;
      }
    }
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) s += gi[j * n + l] * o[j * n + l];
    }
    scal(k, 0) = s;
  }
  return {std::move(ric), std::move(scal)};
}

RiemannSymmetryDefects riemann_symmetry_defects(const TensorField& riem, FdOrder p) {
  const int n = riem.dim();
  std::array<TensorField, 4> f{riem, riem, riem, riem};
  for (auto& x : f) x *= 0.0;
  auto at = [n](int i, int j, int k, int l) {
    return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
  };
  for (std::size_t node = 0; node < riem.node_count(); ++node) {
    const double* r = riem.node(node).data();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            const std::size_t q = at(i, j, k, l);
            f[0](node, q) = r[q] + r[at(j, i, k, l)];
            f[1](node, q) = r[q] + r[at(i, j, l, k)];
            f[2](node, q) = r[q] - r[at(k, l, i, j)];
            f[3](node, q) = r[q] + r[at(i, k, l, j)] + r[at(i, l, j, k)];
          }
        }
      }
    }
  }
  const auto nodes = residual_nodes(riem.grid(), p);
  return {norms(f[0], nodes), norms(f[1], nodes), norms(f[2], nodes), norms(f[3], nodes)};
}

Norms ricci_identity_residual(const TensorField& v, const MetricField& m, FdOrder p) {
  if (v.rank() != 1 || v.variances()[0] != Variance::covariant || v.ambient() != 1) {
    throw ShapeError("ricci_identity_residual expects a covariant vector field");
  }
  const int n = m.dim();
  const TensorField gamma = christoffel(m, p);
  const TensorField rup = raise_index(riemann_covariant(m, gamma, p), m, 0);
  const TensorField dd = covariant_derivative(covariant_derivative(v, gamma, p), gamma, p);
  TensorField res = TensorField::covariant(m.grid_ptr(), 3);
  for (std::size_t k = 0; k < res.node_count(); ++k) {
    const double* a = dd.node(k).data();
    const double* r = rup.node(k).data();
    const double* vk = v.node(k).data();
    double* o = res.node(k).data();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int kk = 0; kk < n; ++kk) {
          double x = a[(i * n + j) * n + kk] - a[(j * n + i) * n + kk];
          for (int l = 0; l < n; ++l) x += r[((l * n + kk) * n + i) * n + j] * vk[l];
          o[(i * n + j) * n + kk] = x;
        }
      }
    }
  }
  return norms(res, residual_nodes(m.grid(), p));
}

Norms bianchi_residual(const TensorField& riem, const MetricField& m, FdOrder p) {
  const int n = m.dim();
  const TensorField gamma = christoffel(m, p);
  const TensorField d = covariant_derivative(riem, gamma, p);
  const std::size_t r4 = ipow(n, 4);
  const std::size_t r2 = ipow(n, 2);
  TensorField res = TensorField::covariant(m.grid_ptr(), 5);
  for (std::size_t node = 0; node < res.node_count(); ++node) {
    const double* dk = d.node(node).data();
    double* o = res.node(node).data();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          for (std::size_t lm = 0; lm < r2; ++lm) {
            auto at = [&](int a, int b, int c) { return dk[a * r4 + (b * n + c) * r2 + lm]; };
            o[((i * n + j) * n + k) * r2 + lm] = at(i, j, k) + at(j, k, i) + at(k, i, j);
          }
        }
      }
    }
  }
  return norms(res, residual_nodes(m.grid(), p));
}

Norms metric_compatibility_residual(const MetricField& m, FdOrder p) {
  const TensorField gamma = christoffel(m, p);
  return norms(covariant_derivative(m.g(), gamma, p), residual_nodes(m.grid(), p));
}

TensorField full_contraction(const TensorField& a, const TensorField& b, const MetricField& m) {
  require_same_shape(a, b, "full_contraction");
  if (a.ambient() != 1) throw ShapeError("full_contraction expects scalar-valued tensors");
  TensorField up = b;
  for (int s = 0; s < b.rank(); ++s) up = raise_index(up, m, s);
  TensorField out = TensorField::scalar(a.grid_ptr());
  for (std::size_t k = 0; k < a.node_count(); ++k) {
    const auto x = a.node(k);
    const auto y = up.node(k);
    double acc = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) acc += x[q] * y[q];
    out(k, 0) = acc;
  }
  return out;
}

}  // namespace curvflow
