#include "curvflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numbers>

#include "curvflow/curvature.hpp"
#include "curvflow/derivative.hpp"
#include "curvflow/embedding.hpp"
#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

constexpr double kRoundoff = 1e-11;

std::size_t i4(int n, int a, int b, int c, int d) { return ((a * n + b) * n + c) * n + d; }
std::size_t i2(int n, int a, int b) { return a * n + b; }

TensorField raise_slots(const TensorField& t, const MetricField& m, std::initializer_list<int> slots) {
  TensorField out = t;
  for (int s : slots) out = raise_index(out, m, s);
  return out;
}

/// nabla_a nabla_b T for any covariant tensor, slots (a, b, ...).
TensorField second_covariant(const TensorField& t, const TensorField& gamma, FdOrder p) {
  return covariant_derivative(covariant_derivative(t, gamma, p), gamma, p);
}

TensorField scalar_laplacian(const CurvaturePack& cp) {
  return laplace_beltrami(cp.scalar, cp.metric, cp.christoffel, cp.p);
}

// Nodewise combination of scalar fields: out = f(lapR, ric2, riem2, R).
template <class F>
TensorField scalar_combination(const CurvaturePack& cp, bool need_riem2, F&& f) {
  const TensorField lap = scalar_laplacian(cp);
  const TensorField ric2 = full_contraction(cp.ricci, cp.ricci, cp.metric);
  const TensorField riem2 =
      need_riem2 ? full_contraction(cp.riemann, cp.riemann, cp.metric) : TensorField::scalar(cp.metric.grid_ptr());
  TensorField out = TensorField::scalar(cp.metric.grid_ptr());
  for (std::size_t k = 0; k < out.node_count(); ++k) {
    out(k, 0) = f(lap(k, 0), ric2(k, 0), riem2(k, 0), cp.scalar(k, 0));
  }
  return out;
}

double max_abs(const TensorField& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

TensorField sample_metric(const GridPtr& grid,
                          const std::function<void(std::span<const double>, std::span<double>)>& f) {
  TensorField out = TensorField::covariant(grid, 2);
  for (std::size_t k = 0; k < out.node_count(); ++k) f(node_coordinates(*grid, k), out.node(k));
  return out;
}

// Smooth covector used by the Ricci-identity check; periodic on periodic axes.
TensorField test_covector(const GridPtr& grid) {
  const int n = grid->dim();
  std::vector<double> w(n);
  for (int a = 0; a < n; ++a) {
    w[a] = grid->mode(a) == BoundaryMode::periodic ? 2.0 * std::numbers::pi / grid->axis(a).extent : 1.0;
  }
  TensorField v = TensorField::covariant(grid, 1);
  for (std::size_t k = 0; k < v.node_count(); ++k) {
    const auto x = node_coordinates(*grid, k);
    for (int c = 0; c < n; ++c) {
      v(k, c) = std::sin(w[0] * x[0] + c) + 0.5 * std::cos(w[n - 1] * x[n - 1] - 2.0 * c);
    }
  }
  return v;
}

std::size_t middle(const FlowTrajectory& traj) { return (traj.snapshots.size() - 1) / 2; }

MetricField state_metric(const FlowState& s, FdOrder p) {
  return s.is_embedding() ? induced_metric(s.embedding(), p) : s.metric();
}

double grid_h(const ChartGrid& g) {
  double h = 0.0;
  for (int a = 0; a < g.dim(); ++a) h = std::max(h, g.spacing(a));
  return h;
}

CheckEntry compare(const std::string& name, Tier tier, const TensorField& lhs,
                   const TensorField& rhs, std::span<const std::size_t> nodes) {
  CheckEntry e;
  e.name = name;
  e.tier = tier;
  e.residual = norms(lhs - rhs, nodes);
  e.lhs = norms(lhs, nodes);
  e.rhs = norms(rhs, nodes);
  return e;
}

CheckEntry algebraic(const std::string& name, const TensorField& a, const TensorField& b,
                     std::span<const std::size_t> nodes) {
  CheckEntry e = compare(name, Tier::algebraic, a, b, nodes);
  double bmax = 0.0;
  for (std::size_t k : nodes) bmax = std::max(bmax, std::abs(b(k, 0)));
  const double floor = std::max(kAlgebraicFloor * bmax, std::numeric_limits<double>::min());
  double rel = 0.0;
  for (std::size_t k : nodes) {
    rel = std::max(rel, std::abs(a(k, 0) - b(k, 0)) / std::max(std::abs(b(k, 0)), floor));
  }
  e.relative = rel;
  return e;
}

}  // namespace

CurvaturePack curvature_pack(const MetricField& m, FdOrder p) {
  TensorField gamma = christoffel(m, p);
  TensorField riem = riemann_covariant(m, gamma, p);
  auto [ric, scal] = ricci_and_scalar(riem, m);
  return {m, std::move(gamma), std::move(riem), std::move(ric), std::move(scal), p};
}

double pack_contraction_defect(const CurvaturePack& cp) {
  const auto [ric, scal] = ricci_and_scalar(cp.riemann, cp.metric);
  auto rel = [](const TensorField& a, const TensorField& b) {
    const double scale = std::max(max_abs(b), std::numeric_limits<double>::min());
    return max_abs(a - b) / scale;
  };
  if (max_abs(cp.ricci) == 0.0 && max_abs(ric) == 0.0) return 0.0;
  return std::max(rel(cp.ricci, ric), max_abs(cp.scalar) == 0.0 && max_abs(scal) == 0.0
                                          ? 0.0
                                          : rel(cp.scalar, scal));
}

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::metric: return "metric";
    case Quantity::riemann_extrinsic: return "riemann_extrinsic";
    case Quantity::riemann: return "riemann";
    case Quantity::ricci: return "ricci";
    case Quantity::scalar: return "scalar";
  }
  return "?";
}

TensorField snapshot_quantity(const FlowState& s, Quantity q, FdOrder p) {
  if (q == Quantity::riemann_extrinsic) {
    if (!s.is_embedding()) throw ConfigError("extrinsic Riemann needs an embedding snapshot");
    const auto& e = s.embedding();
    return riemann_extrinsic(gauss_tensor(e, p), e.signature());
  }
  const MetricField m = state_metric(s, p);
  if (q == Quantity::metric) return m.g();
  TensorField riem = riemann_covariant(m, p);
  if (q == Quantity::riemann) return riem;
  auto [ric, scal] = ricci_and_scalar(riem, m);
  return q == Quantity::ricci ? std::move(ric) : std::move(scal);
}

TensorField fd_time_derivative(const FlowTrajectory& traj, Quantity q, std::size_t k, FdOrder p) {
  if (traj.snapshots.size() < 3 || k < 1 || k + 1 >= traj.snapshots.size()) {
    throw ConfigError("centered time difference needs snapshots k-1, k, k+1 (k = " +
                      std::to_string(k) + ", " + std::to_string(traj.snapshots.size()) +
                      " stored)");
  }
  TensorField d = snapshot_quantity(traj.snapshots[k + 1], q, p);
  d -= snapshot_quantity(traj.snapshots[k - 1], q, p);
  d *= 1.0 / (2.0 * traj.snapshot_spacing());
  return d;
}

TensorField b_tensor(const CurvaturePack& cp) {
  const TensorField H = second_covariant(cp.ricci, cp.christoffel, cp.p);
  const int n = cp.metric.dim();
  TensorField B = TensorField::covariant(cp.metric.grid_ptr(), 4);
  for (std::size_t node = 0; node < B.node_count(); ++node) {
    const double* h = H.node(node).data();
    double* o = B.node(node).data();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            o[i4(n, i, j, k, l)] = h[i4(n, i, k, l, j)] - h[i4(n, j, k, l, i)] -
                                   h[i4(n, i, l, k, j)] + h[i4(n, j, l, k, i)] +
                                   h[i4(n, k, i, j, l)] - h[i4(n, l, i, j, k)] -
                                   h[i4(n, k, j, i, l)] + h[i4(n, l, j, i, k)];
          }
  }
  return B;
}

TensorField rhs_eq18(const EmbeddingField& e, FdOrder p) {
  const ExtrinsicGeometry geo = extrinsic_geometry(e, p);
  const TensorField HL = covariant_hessian(geo.mean_curvature, geo.christoffel, p);
  const TensorField& G = geo.gauss.g;
  const int n = e.grid().dim();
  const int amb = e.ambient_dim();
  const auto& sig = e.signature();
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  TensorField out = TensorField::covariant(e.grid_ptr(), 4);
  std::vector<double> dots(n2 * n2);
  for (std::size_t node = 0; node < out.node_count(); ++node) {
    const double* hl = HL.node(node).data();
    const double* g = G.node(node).data();
    // dots[(ab)(cd)] = nabla_ab L . nabla_cd X
    for (std::size_t ab = 0; ab < n2; ++ab)
      for (std::size_t cd = 0; cd < n2; ++cd) dots[ab * n2 + cd] = sig.dot(hl + ab * amb, g + cd * amb);
    double* o = out.node(node).data();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const std::size_t ik = i2(n, i, k), jl = i2(n, j, l), il = i2(n, i, l), jk = i2(n, j, k);
            o[i4(n, i, j, k, l)] = dots[ik * n2 + jl] + dots[jl * n2 + ik] - dots[il * n2 + jk] -
                                   dots[jk * n2 + il];
          }
  }
  return out;
}

TensorField rhs_eq18(const FlowTrajectory& traj, std::size_t k, FdOrder p) {
  if (k >= traj.snapshots.size()) throw ConfigError("snapshot index out of range");
  const FlowState& s = traj.snapshots[k];
  if (!s.is_embedding()) throw ConfigError("the Riemann evolution check needs an embedding");
  return rhs_eq18(s.embedding(), p);
}

TensorField rhs_eq20(const CurvaturePack& cp, const TensorField& dtg) {
  const int n = cp.metric.dim();
  const MetricField& m = cp.metric;
  const TensorField& R = cp.riemann;
  const TensorField lapR = covariant_laplacian(R, m, cp.christoffel, cp.p);
  const TensorField B = b_tensor(cp);
  const TensorField ricUp = raise_index(cp.ricci, m, 0);  // R^m_i
  const TensorField rUp = raise_index(R, m, 0);           // R^m_jkl
  const TensorField rUp02 = raise_slots(R, m, {0, 2});    // R^m_k^n_i
  const TensorField rUp01 = raise_slots(R, m, {0, 1});    // R^mn_ij

  TensorField out = TensorField::covariant(m.grid_ptr(), 4);
  for (std::size_t node = 0; node < out.node_count(); ++node) {
    const double* r = R.node(node).data();
    const double* lr = lapR.node(node).data();
    const double* b = B.node(node).data();
    const double* ru = ricUp.node(node).data();
    const double* r0 = rUp.node(node).data();
    const double* r02 = rUp02.node(node).data();
    const double* r01 = rUp01.node(node).data();
    const double* dg = dtg.node(node).data();
    double* o = out.node(node).data();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double ricci_terms = 0.0;
            double cross = 0.0;
            double dtg_terms = 0.0;
            for (int mm = 0; mm < n; ++mm) {
              ricci_terms += r[i4(n, mm, j, k, l)] * ru[i2(n, mm, i)] +
                             r[i4(n, i, mm, k, l)] * ru[i2(n, mm, j)] +
                             r[i4(n, i, j, mm, l)] * ru[i2(n, mm, k)] +
                             r[i4(n, i, j, k, mm)] * ru[i2(n, mm, l)];
              for (int nn = 0; nn < n; ++nn) {
                cross += 8.0 * r02[i4(n, mm, k, nn, i)] * r[i4(n, mm, j, nn, l)] -
                         8.0 * r02[i4(n, mm, k, nn, j)] * r[i4(n, mm, i, nn, l)] +
                         4.0 * r01[i4(n, mm, nn, i, j)] * r[i4(n, mm, nn, k, l)];
              }
              dtg_terms += r0[i4(n, mm, j, k, l)] * dg[i2(n, i, mm)] -
                           r0[i4(n, mm, i, k, l)] * dg[i2(n, j, mm)] +
                           r0[i4(n, mm, l, i, j)] * dg[i2(n, k, mm)] -
                           r0[i4(n, mm, k, i, j)] * dg[i2(n, l, mm)];
            }
            const std::size_t q = i4(n, i, j, k, l);
            o[q] = 0.5 * (4.0 * lr[q] - b[q] - 4.0 * ricci_terms + cross + dtg_terms);
          }
  }
  return out;
}

TensorField rhs_eq21(const CurvaturePack& cp, const TensorField& dtg) {
  const int n = cp.metric.dim();
  const MetricField& m = cp.metric;
  const TensorField lapRic = covariant_laplacian(cp.ricci, m, cp.christoffel, cp.p);
  const TensorField H = second_covariant(cp.ricci, cp.christoffel, cp.p);  // nabla_a nabla_b R_cd
  const TensorField hessR = covariant_hessian(cp.scalar, cp.christoffel, cp.p);
  const TensorField ricUp = raise_index(cp.ricci, m, 0);                   // R^m_j
  const TensorField rUp3 = raise_slots(cp.riemann, m, {0, 1, 2});         // R^mnp_l

  TensorField out = TensorField::covariant(m.grid_ptr(), 2);
  for (std::size_t node = 0; node < out.node_count(); ++node) {
    const double* gi = m.inverse().node(node).data();
    const double* h = H.node(node).data();
    const double* lr = lapRic.node(node).data();
    const double* hr = hessR.node(node).data();
    const double* ric = cp.ricci.node(node).data();
    const double* ru = ricUp.node(node).data();
    const double* r = cp.riemann.node(node).data();
    const double* r3 = rUp3.node(node).data();
    const double* dg = dtg.node(node).data();
    double* o = out.node(node).data();
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        // nabla_m nabla_j R^m_l = g^ma H_{m j a l}
        double div = 0.0;
        for (int mm = 0; mm < n; ++mm)
          for (int a = 0; a < n; ++a) {
            div += gi[i2(n, mm, a)] * (h[i4(n, mm, j, a, l)] + h[i4(n, mm, l, a, j)]);
          }
        double ric2 = 0.0;
        double dtg_terms = 0.0;
        double riem3 = 0.0;
        for (int mm = 0; mm < n; ++mm) {
          ric2 += ric[i2(n, mm, j)] * ru[i2(n, mm, l)];
          dtg_terms += ru[i2(n, mm, j)] * dg[i2(n, l, mm)] + ru[i2(n, mm, l)] * dg[i2(n, j, mm)];
          for (int nn = 0; nn < n; ++nn)
            for (int pp = 0; pp < n; ++pp) {
              riem3 += r[i4(n, mm, nn, pp, j)] * r3[i4(n, mm, nn, pp, l)];
            }
        }
        const std::size_t q = i2(n, j, l);
        o[q] = 0.5 * (2.0 * lr[q] + 2.0 * div - 2.0 * hr[q] - 8.0 * ric2 - 4.0 * riem3 + dtg_terms);
      }
  }
  return out;
}

TensorField rhs_eq22(const CurvaturePack& cp) {
  return scalar_combination(cp, true, [](double lap, double ric2, double riem2, double) {
    return lap - 4.0 * ric2 - 2.0 * riem2;
  });
}

TensorField rhs_eq23(const CurvaturePack& cp) {
  if (cp.metric.dim() != 2) throw ConfigError("the 2D scalar-curvature form needs dimension 2");
  return scalar_combination(cp, false, [](double lap, double, double, double R) {
    return lap - 4.0 * R * R;
  });
}

TensorField rhs_eq24(const CurvaturePack& cp) {
  if (cp.metric.dim() != 3) throw ConfigError("the 3D scalar-curvature form needs dimension 3");
  return scalar_combination(cp, false, [](double lap, double ric2, double, double R) {
    return lap - 12.0 * ric2 + 2.0 * R * R;
  });
}

TensorField weyl_square(const CurvaturePack& cp) {
  const double d = cp.metric.dim();
  if (d < 3) throw ConfigError("the Weyl square needs dimension >= 3");
  return scalar_combination(cp, true, [d](double, double ric2, double riem2, double R) {
    return riem2 - 4.0 / (d - 2.0) * ric2 + 2.0 / ((d - 1.0) * (d - 2.0)) * R * R;
  });
}

TensorField rhs_eq25(const CurvaturePack& cp) {
  const double d = cp.metric.dim();
  if (d < 4) throw ConfigError("the d >= 4 scalar-curvature form needs dimension >= 4");
  const TensorField w2 = weyl_square(cp);
  TensorField out = scalar_combination(cp, false, [d](double lap, double ric2, double, double R) {
    return lap - 4.0 * d / (d - 2.0) * ric2 + 4.0 / ((d - 2.0) * (d - 1.0)) * R * R;
  });
  out.axpy(-2.0, w2);
  return out;
}

TensorField rhs_eq10(const CurvaturePack& cp) {
  return scalar_combination(cp, false, [](double lap, double ric2, double, double) {
    return lap + 2.0 * ric2;
  });
}

const char* tier_name(Tier t) {
  switch (t) {
    case Tier::exactness: return "exactness";
    case Tier::algebraic: return "algebraic";
    case Tier::reported: return "reported";
  }
  return "?";
}

double CheckInfo::expected_order(FdOrder p) const {
  return std::min(2.0, static_cast<double>(static_cast<int>(p)));
}

double CheckInfo::identity_threshold(FdOrder p) const {
  if (name == "eq18") return 1.0;
  return expected_order(p) - 0.5;
}

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> registry = {
      {"eq12", Tier::exactness, CheckSource::snapshot, true},
      {"eq14", Tier::exactness, CheckSource::snapshot, true},
      {"gauss_equation", Tier::exactness, CheckSource::snapshot, true},
      {"eq3_vs_eq5", Tier::exactness, CheckSource::snapshot, false},
      {"eq4", Tier::exactness, CheckSource::snapshot, false},
      {"eq8", Tier::exactness, CheckSource::snapshot, false},
      {"metric_compatibility", Tier::exactness, CheckSource::snapshot, false},
      {"eq17", Tier::exactness, CheckSource::mcf, true},
      {"eq18", Tier::exactness, CheckSource::mcf, true},
      {"eq10", Tier::exactness, CheckSource::ricci_flow, false},
      {"eq23_vs_eq22", Tier::algebraic, CheckSource::snapshot, false},
      {"eq24_vs_eq22", Tier::algebraic, CheckSource::snapshot, false},
      {"eq25_vs_eq22", Tier::algebraic, CheckSource::snapshot, false},
      {"eq20", Tier::reported, CheckSource::mcf, true},
      {"eq20_fd_dtg", Tier::reported, CheckSource::mcf, true},
      {"eq21", Tier::reported, CheckSource::mcf, true},
      {"eq21_fd_dtg", Tier::reported, CheckSource::mcf, true},
      {"eq22", Tier::reported, CheckSource::mcf, true},
  };
  return registry;
}

const CheckInfo& check_info(const std::string& name) {
  for (const auto& c : check_registry()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown check '" + name + "'");
}

const CheckEntry* ResidualReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

ResidualReport run_checks(const Scenario& s, const std::vector<std::string>& which,
                          const FlowTrajectory* mcf, const FlowTrajectory* ricci,
                          std::optional<std::size_t> k, FdOrder p) {
  std::vector<const CheckInfo*> selected;
  for (const auto& name : which) {
    const CheckInfo& info = check_info(name);
    if (info.needs_embedding && !s.embedding) {
      throw ConfigError("check '" + name + "' needs an embedded scenario; '" + s.name +
                        "' is intrinsic");
    }
    if (info.source == CheckSource::mcf && !mcf) {
      throw ConfigError("check '" + name + "' needs a mean curvature flow trajectory");
    }
    if (info.source == CheckSource::ricci_flow && !ricci) {
      throw ConfigError("check '" + name + "' needs a Ricci flow trajectory");
    }
  }
  for (const auto& info : check_registry()) {
    if (std::find(which.begin(), which.end(), info.name) != which.end()) selected.push_back(&info);
  }

  const std::size_t k_mcf = mcf ? k.value_or(middle(*mcf)) : 0;
  const std::size_t k_ricci = ricci ? k.value_or(middle(*ricci)) : 0;
  for (const FlowTrajectory* traj : {mcf, ricci}) {
    if (!traj) continue;
    const std::size_t kk = traj == mcf ? k_mcf : k_ricci;
    if (kk >= traj->snapshots.size()) throw ConfigError("snapshot index out of range");
  }

  ResidualReport report;
  report.scenario = s.name;
  for (int a = 0; a < s.grid->dim(); ++a) report.counts.push_back(s.grid->count(a));
  report.p = p;
  const FlowTrajectory* primary = mcf ? mcf : ricci;
  if (primary) {
    report.dt = primary->schedule.dt;
    report.snapshot = primary == mcf ? k_mcf : k_ricci;
    report.t = primary->snapshots[report.snapshot].t;
  }

  // Snapshot source for static checks.
  std::optional<FlowState> snap;
  if (mcf) {
    snap = mcf->snapshots[k_mcf];
  } else if (s.embedding) {
    EmbeddingField e = *s.embedding;
    e.fill_halo();
    snap = FlowState{0.0, std::move(e)};
  } else {
    snap = FlowState{0.0, s.initial_metric(p)};
  }
  const GridPtr& grid = s.grid;
  const auto nodes = residual_nodes(*grid, p);
  const MetricField m = state_metric(*snap, p);
  std::optional<CurvaturePack> pack;
  auto get_pack = [&]() -> const CurvaturePack& {
    if (!pack) pack = curvature_pack(m, p);
    return *pack;
  };

  // Lazily shared MCF data at snapshot k.
  std::optional<CurvaturePack> mcf_pack;
  std::optional<TensorField> dtg_eq17;
  std::optional<TensorField> dtg_fd;
  auto mcf_state = [&]() -> const FlowState& { return mcf->snapshots[k_mcf]; };
  auto get_mcf_pack = [&]() -> const CurvaturePack& {
    if (!mcf_pack) mcf_pack = curvature_pack(state_metric(mcf_state(), p), p);
    return *mcf_pack;
  };
  auto get_dtg = [&]() -> const TensorField& {
    if (!dtg_eq17) dtg_eq17 = metric_evolution_rhs(mcf_state().embedding(), p);
    return *dtg_eq17;
  };
  auto get_dtg_fd = [&]() -> const TensorField& {
    if (!dtg_fd) dtg_fd = fd_time_derivative(*mcf, Quantity::metric, k_mcf, p);
    return *dtg_fd;
  };

  for (const CheckInfo* info : selected) {
    const std::string& name = info->name;
    CheckEntry e;
    if (name == "eq12") {
      if (!s.oracles.metric) throw ConfigError("check 'eq12' needs a metric oracle");
      EmbeddingField e0 = *s.embedding;
      e0.fill_halo();
      const TensorField g = induced_metric(e0, p).g();
      const TensorField g_exact = sample_metric(grid, s.oracles.metric);
      e = compare(name, info->tier, g, g_exact, nodes);
      e.note = "induced metric of the initial embedding against the analytic metric";
    } else if (name == "eq14") {
      const auto& emb = snap->embedding();
      const GaussTensorField G = gauss_tensor(emb, p);
      e.name = name;
      e.tier = info->tier;
      e.residual = tangency_residual(emb, G, p);
      e.lhs = norms(G.g, nodes);
    } else if (name == "gauss_equation") {
      const auto& emb = snap->embedding();
      e = compare(name, info->tier, riemann_extrinsic(gauss_tensor(emb, p), emb.signature()),
                  get_pack().riemann, nodes);
    } else if (name == "eq3_vs_eq5") {
      const TensorField mixed = riemann_mixed(m, get_pack().christoffel, p);
      e = compare(name, info->tier, lower_index(mixed, m, 0), get_pack().riemann, nodes);
    } else if (name == "eq4") {
      e.name = name;
      e.tier = info->tier;
      e.residual = ricci_identity_residual(test_covector(grid), m, p);
    } else if (name == "eq8") {
      e.name = name;
      e.tier = info->tier;
      e.residual = bianchi_residual(get_pack().riemann, m, p);
      e.lhs = norms(get_pack().riemann, nodes);
    } else if (name == "metric_compatibility") {
      e.name = name;
      e.tier = info->tier;
      e.residual = metric_compatibility_residual(m, p);
    } else if (name == "eq17") {
      e = compare(name, info->tier, get_dtg_fd(), get_dtg(), nodes);
    } else if (name == "eq18") {
      e = compare(name, info->tier, fd_time_derivative(*mcf, Quantity::riemann_extrinsic, k_mcf, p),
                  rhs_eq18(*mcf, k_mcf, p), nodes);
    } else if (name == "eq10") {
      const CurvaturePack cp = curvature_pack(ricci->snapshots[k_ricci].metric(), p);
      e = compare(name, info->tier, fd_time_derivative(*ricci, Quantity::scalar, k_ricci, p),
                  rhs_eq10(cp), nodes);
      if (s.oracles.ricci_flow_scalar_rate) {
        const double t = ricci->snapshots[k_ricci].t;
        e.lhs_oracle = s.oracles.ricci_flow_scalar_rate(t);
        e.rhs_oracle = e.lhs_oracle;
      }
    } else if (name == "eq23_vs_eq22") {
      e = algebraic(name, rhs_eq23(get_pack()), rhs_eq22(get_pack()), nodes);
    } else if (name == "eq24_vs_eq22") {
      e = algebraic(name, rhs_eq24(get_pack()), rhs_eq22(get_pack()), nodes);
    } else if (name == "eq25_vs_eq22") {
      e = algebraic(name, rhs_eq25(get_pack()), rhs_eq22(get_pack()), nodes);
    } else if (name == "eq20" || name == "eq20_fd_dtg") {
      const TensorField& dtg = name == "eq20" ? get_dtg() : get_dtg_fd();
      e = compare(name, info->tier, fd_time_derivative(*mcf, Quantity::riemann, k_mcf, p),
                  rhs_eq20(get_mcf_pack(), dtg), nodes);
      e.note = "cross terms raise R_akbi as g^ma g^nb (first and third slots) and R_abij as "
               "g^ma g^nb (first pair); printed right-hand side halved";
    } else if (name == "eq21" || name == "eq21_fd_dtg") {
      const TensorField& dtg = name == "eq21" ? get_dtg() : get_dtg_fd();
      e = compare(name, info->tier, fd_time_derivative(*mcf, Quantity::ricci, k_mcf, p),
                  rhs_eq21(get_mcf_pack(), dtg), nodes);
      e.note = "printed right-hand side halved";
    } else if (name == "eq22") {
      e = compare(name, info->tier, fd_time_derivative(*mcf, Quantity::scalar, k_mcf, p),
                  rhs_eq22(get_mcf_pack()), nodes);
      const double t = mcf_state().t;
      if (s.oracles.flow_scalar_rate) e.lhs_oracle = s.oracles.flow_scalar_rate(t);
      if (s.oracles.flow_scalar_quadratic_rhs) e.rhs_oracle = s.oracles.flow_scalar_quadratic_rhs(t);
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

ResidualReport run_evolution_checks(const Scenario& s, const FlowTrajectory& traj,
                                    std::optional<std::size_t> k,
                                    const std::vector<std::string>& which, FdOrder p) {
  if (traj.snapshots.empty()) throw ConfigError("empty trajectory");
  const bool is_mcf = traj.snapshots.front().is_embedding();
  return run_checks(s, which, is_mcf ? &traj : nullptr, is_mcf ? nullptr : &traj, k, p);
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& residuals) {
  const std::size_t n = h.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(std::max(residuals[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

CheckConvergence classify(const std::string& name, Tier tier, const std::vector<double>& h,
                          const std::vector<double>& residuals, const std::vector<double>& lhs,
                          const std::vector<double>& rhs, double threshold,
                          const std::vector<std::optional<double>>& relative) {
  CheckConvergence c;
  c.name = name;
  c.tier = tier;
  c.residuals = residuals;
  c.lhs = lhs;
  c.rhs = rhs;
  const std::size_t n = residuals.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = std::max(residuals[i], std::numeric_limits<double>::min());
    const double b = std::max(residuals[i + 1], std::numeric_limits<double>::min());
    c.pairwise_orders.push_back(std::log(a / b) / std::log(h[i] / h[i + 1]));
  }
  c.fitted_order = fitted_order(h, residuals);

  if (tier == Tier::algebraic) {
    const bool ok = std::all_of(relative.begin(), relative.end(), [](const auto& r) {
      return r && *r <= kAlgebraicTolerance;
    });
    c.classification = ok ? "algebraic_pass" : "algebraic_fail";
    c.passed = ok;
    return c;
  }

  bool exact = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::max({1.0, lhs[i], rhs[i]});
    if (residuals[i] > kRoundoff * scale) exact = false;
  }
  const double top = c.pairwise_orders.empty() ? 0.0 : c.pairwise_orders.back();
  if (exact) {
    c.classification = "exact";
  } else if (top >= threshold) {
    c.classification = "identity";
  } else {
    const auto [lo, hi] = std::minmax_element(residuals.begin(), residuals.end());
    auto converges = [n](const std::vector<double>& v) {
      if (n < 3) return false;
      for (std::size_t i = 2; i < n; ++i) {
        if (std::abs(v[i] - v[i - 1]) > std::abs(v[i - 1] - v[i - 2])) return false;
      }
      return true;
    };
    const bool flat = *lo > 0.0 && *hi < 1.2 * *lo;
    c.classification = flat && converges(lhs) && converges(rhs) ? "plateau" : "nonconvergent";
  }
  c.passed = tier == Tier::reported || c.classification == "identity" || c.classification == "exact";
  return c;
}

bool ConvergenceStudy::all_required_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

IntegratorConfig verification_schedule(const Scenario& s, const IntegratorConfig& c, FdOrder p,
                                       CheckSource source) {
  double auto_dt = 0.0;
  double bound = 0.0;
  std::optional<double> extinction;
  if (source == CheckSource::ricci_flow) {
    const MetricField m = s.initial_metric(p);
    auto_dt = suggest_dt(m, c.cfl_safety);
    bound = suggest_dt(m, 1.0);
    extinction = s.oracles.ricci_extinction_time;
  } else {
    if (!s.embedding) throw ConfigError("scenario '" + s.name + "' has no embedding");
    EmbeddingField e = *s.embedding;
    e.fill_halo();
    const MetricField m = induced_metric(e, p);
    auto_dt = suggest_dt(m, c.cfl_safety);
    bound = suggest_dt(m, 1.0);
    extinction = s.oracles.extinction_time;
  }
  const Schedule sched = resolve_schedule(c, auto_dt, bound, extinction);
  long intervals = sched.steps / sched.stride;
  if (intervals % 2 != 0) ++intervals;
  IntegratorConfig out = c;
  out.dt = c.t_end / static_cast<double>(intervals * sched.stride);
  return out;
}

ConvergenceStudy convergence_study(const StudyConfig& c) {
  if (c.which.empty()) throw ConfigError("a convergence study needs at least one check");
  if (c.levels.empty()) throw ConfigError("a convergence study needs at least one level");
  bool need_mcf = false;
  bool need_ricci = false;
  for (const auto& name : c.which) {
    const CheckInfo& info = check_info(name);
    if (info.tier != Tier::algebraic && c.levels.size() < 3) {
      throw ConfigError("check '" + name + "' needs a study with at least 3 levels");
    }
    need_mcf = need_mcf || info.source == CheckSource::mcf;
    need_ricci = need_ricci || info.source == CheckSource::ricci_flow;
  }

  ConvergenceStudy study;
  for (const auto& level : c.levels) {
    ScenarioSpec spec = c.scenario;
    spec.counts = level.counts;
    const Scenario s = make_scenario(spec, c.p);
    IntegratorConfig ic = c.integrator;
    ic.dt = level.dt;
    std::optional<FlowTrajectory> mcf;
    std::optional<FlowTrajectory> ricci;
    auto check = [](const FlowTrajectory& t) {
      if (t.degenerated) throw DegenerateMetricError("flow degenerated: " + t.degeneration, 0);
    };
    if (need_mcf) {
      mcf = integrate_mcf(s, verification_schedule(s, ic, c.p, CheckSource::mcf), c.p);
      check(*mcf);
    }
    if (need_ricci) {
      ricci = integrate_ricci_flow(s, verification_schedule(s, ic, c.p, CheckSource::ricci_flow),
                                   c.p);
      check(*ricci);
    }
    LevelResult lr;
    for (int a = 0; a < s.grid->dim(); ++a) lr.counts.push_back(s.grid->count(a));
    lr.h = grid_h(*s.grid);
    lr.report = run_checks(s, c.which, mcf ? &*mcf : nullptr, ricci ? &*ricci : nullptr,
                           c.snapshot, c.p);
    lr.dt = lr.report.dt;
    lr.t = lr.report.t;
    study.levels.push_back(std::move(lr));
  }

  std::vector<double> h;
  for (const auto& l : study.levels) h.push_back(l.h);
  for (const auto& entry : study.levels.front().report.entries) {
    std::vector<double> res, lhs, rhs;
    std::vector<std::optional<double>> rel;
    for (const auto& l : study.levels) {
      const CheckEntry* e = l.report.find(entry.name);
      res.push_back(e->residual.linf);
      lhs.push_back(e->lhs ? e->lhs->linf : 0.0);
      rhs.push_back(e->rhs ? e->rhs->linf : 0.0);
      rel.push_back(e->relative);
    }
    const CheckInfo& info = check_info(entry.name);
    study.checks.push_back(
        classify(entry.name, entry.tier, h, res, lhs, rhs, info.identity_threshold(c.p), rel));
  }
  return study;
}

}  // namespace curvflow
