#include "curvflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvflow/curvature.hpp"
#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

void zero_outside_band(TensorField& f) {
  const ChartGrid& grid = f.grid();
  if (!grid.has_ghost_axes()) return;
  for (std::size_t k = 0; k < f.node_count(); ++k) {
    if (!grid.in_band(k)) {
      auto v = f.node(k);
      std::fill(v.begin(), v.end(), 0.0);
    }
  }
}

bool all_finite(const TensorField& f) {
  return std::all_of(f.data().begin(), f.data().end(), [](double x) { return std::isfinite(x); });
}

double min_h2(const ChartGrid& grid) {
  double h2 = grid.spacing(0) * grid.spacing(0);
  for (int a = 1; a < grid.dim(); ++a) h2 = std::min(h2, grid.spacing(a) * grid.spacing(a));
  return h2;
}

// Generic explicit step of y' = rhs(y) on a tensor field whose halo is
// refreshed by `fill` once per stage.
template <class Rhs, class Fill>
TensorField explicit_step(const TensorField& y, double dt, Scheme scheme, Rhs&& rhs, Fill&& fill) {
  if (scheme == Scheme::explicit_euler) {
    TensorField next = y;
    next.axpy(dt, rhs(y));
    fill(next);
    return next;
  }
  const TensorField k1 = rhs(y);
  TensorField stage = y;
  stage.axpy(0.5 * dt, k1);
  fill(stage);
  const TensorField k2 = rhs(stage);
  stage = y;
  stage.axpy(0.5 * dt, k2);
  fill(stage);
  const TensorField k3 = rhs(stage);
  stage = y;
  stage.axpy(dt, k3);
  fill(stage);
  const TensorField k4 = rhs(stage);
  TensorField next = y;
  next.axpy(dt / 6.0, k1);
  next.axpy(dt / 3.0, k2);
  next.axpy(dt / 3.0, k3);
  next.axpy(dt / 6.0, k4);
  fill(next);
  return next;
}

TensorField ricci_rhs(const MetricField& m, FdOrder p) {
  auto [ric, scal] = ricci_and_scalar(riemann_covariant(m, p), m);
  ric *= -2.0;
  zero_outside_band(ric);
  return std::move(ric);
}

void fill_metric_halo(TensorField& g) {
  if (!g.grid().has_ghost_axes()) return;
  const auto& provider = g.grid().boundary_provider();
  if (!provider) throw ConfigError("ghost-mode chart has no boundary provider attached");
  provider->fill_metric(g);
}

}  // namespace

const char* scheme_name(Scheme s) { return s == Scheme::rk4 ? "rk4" : "explicit_euler"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4") return Scheme::rk4;
  if (name == "explicit_euler" || name == "euler") return Scheme::explicit_euler;
  throw ConfigError("unknown integration scheme '" + name + "'");
}

TensorField mcf_rhs(const EmbeddingField& e, FdOrder p) {
  TensorField v = extrinsic_geometry(e, p).mean_curvature;
  zero_outside_band(v);
  return v;
}

TensorField metric_evolution_rhs(const EmbeddingField& e, FdOrder p) {
  const ExtrinsicGeometry geo = extrinsic_geometry(e, p);
  TensorField out = ambient_product(geo.mean_curvature, geo.gauss.g, e.signature());
  out *= -2.0;
  return out;
}

double suggest_dt(const MetricField& m, double safety) {
  const auto nodes = m.grid().band_nodes();
  const double lam = max_inverse_eigenvalue(m, nodes);
  return safety * min_h2(m.grid()) / (2.0 * m.dim() * lam);
}

double suggest_dt(const EmbeddingField& e, double safety, FdOrder p) {
  return suggest_dt(induced_metric(e, p), safety);
}

MetricField ricci_flow_step(const MetricField& m, double dt, Scheme scheme, FdOrder p) {
  const bool riemannian = m.riemannian();
  TensorField next = explicit_step(
      m.g(), dt, scheme,
      [&](const TensorField& g) { return ricci_rhs(MetricField(g, riemannian), p); },
      fill_metric_halo);
  return MetricField(std::move(next), riemannian);
}

Schedule resolve_schedule(const IntegratorConfig& c, double suggested_auto,
                          double stability_bound, std::optional<double> extinction) {
  if (!(c.t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (c.snapshot_stride < 1) throw ConfigError("snapshot_stride must be at least 1");
  if (!(c.cfl_safety > 0.0) || c.cfl_safety > 1.0) {
    throw ConfigError("cfl_safety must lie in (0, 1]");
  }
  if (extinction && c.t_end > 0.8 * *extinction) {
    std::ostringstream msg;
    msg << "t_end = " << c.t_end << " exceeds 80% of the extinction time " << *extinction;
    throw ConfigError(msg.str());
  }
  double dt = suggested_auto;
  if (c.dt) {
    if (!(*c.dt > 0.0)) throw ConfigError("dt must be positive");
    if (*c.dt > stability_bound) {
      std::ostringstream msg;
      msg << "dt = " << *c.dt << " exceeds the explicit stability bound " << stability_bound
          << "; suggested dt = " << suggested_auto;
      throw TimestepError(msg.str(), suggested_auto);
    }
    dt = *c.dt;
  }
  Schedule s;
  s.stride = c.snapshot_stride;
  const double intervals = std::ceil(c.t_end / (dt * c.snapshot_stride) - 1e-9);
  s.steps = static_cast<long>(std::max(1.0, intervals)) * c.snapshot_stride;
  s.dt = c.t_end / static_cast<double>(s.steps);
  return s;
}

FlowTrajectory integrate_mcf(const Scenario& s, const IntegratorConfig& c, FdOrder p) {
  if (!s.embedding) {
    throw ConfigError("scenario '" + s.name + "' has no embedding; mean curvature flow needs one");
  }
  EmbeddingField state = *s.embedding;
  state.fill_halo();
  const MetricField m0 = induced_metric(state, p);
  const Schedule sched = resolve_schedule(c, suggest_dt(m0, c.cfl_safety), suggest_dt(m0, 1.0),
                                          s.oracles.extinction_time);

  FlowTrajectory traj;
  traj.scenario = s.name;
  traj.config = c;
  traj.config.dt = sched.dt;
  traj.schedule = sched;
  traj.snapshots.push_back({0.0, state});

  const auto& sig = state.signature();
  const bool riemannian = state.riemannian();
  auto rhs = [&](const TensorField& x) { return mcf_rhs(EmbeddingField(x, sig, riemannian), p); };
  auto fill = [&](TensorField& x) {
    if (!x.grid().has_ghost_axes()) return;
    x.grid().boundary_provider()->fill_embedding(x);
  };

  for (long step = 1; step <= sched.steps; ++step) {
    try {
      TensorField next = explicit_step(state.x(), sched.dt, c.scheme, rhs, fill);
      if (!all_finite(next)) throw DegenerateEmbeddingError("non-finite embedding values", 0);
      EmbeddingField candidate(std::move(next), sig, riemannian);
      (void)induced_metric(candidate, p);
      state = std::move(candidate);
    } catch (const DegenerateMetricError& err) {
      traj.degenerated = true;
      std::ostringstream msg;
      msg << "step " << step << " (t = " << step * sched.dt << "): " << err.what();
      traj.degeneration = msg.str();
      break;
    }
    if (step % sched.stride == 0) traj.snapshots.push_back({step * sched.dt, state});
  }
  return traj;
}

FlowTrajectory integrate_ricci_flow(const Scenario& s, const IntegratorConfig& c, FdOrder p) {
  MetricField m = s.initial_metric(p);
  {
    TensorField g = m.g();
    fill_metric_halo(g);
    m = MetricField(std::move(g), m.riemannian());
  }
  const Schedule sched = resolve_schedule(c, suggest_dt(m, c.cfl_safety), suggest_dt(m, 1.0),
                                          s.oracles.ricci_extinction_time);
  FlowTrajectory traj;
  traj.scenario = s.name;
  traj.config = c;
  traj.config.dt = sched.dt;
  traj.schedule = sched;
  traj.snapshots.push_back({0.0, m});
  for (long step = 1; step <= sched.steps; ++step) {
    try {
      MetricField next = ricci_flow_step(m, sched.dt, c.scheme, p);
      if (!all_finite(next.g())) throw DegenerateMetricError("non-finite metric values", 0);
      m = std::move(next);
    } catch (const DegenerateMetricError& err) {
      traj.degenerated = true;
      std::ostringstream msg;
      msg << "step " << step << " (t = " << step * sched.dt << "): " << err.what();
      traj.degeneration = msg.str();
      break;
    }
    if (step % sched.stride == 0) traj.snapshots.push_back({step * sched.dt, m});
  }
  return traj;
}

}  // namespace curvflow
