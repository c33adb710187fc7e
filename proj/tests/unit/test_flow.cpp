#include <doctest.h>

#include <cmath>
#include <limits>

#include "curvflow/curvature.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/verify.hpp"
#include "test_support.hpp"

using namespace curvflow;
using namespace curvflow::testing;

namespace {

IntegratorConfig config(double t_end, std::optional<double> dt = std::nullopt, int stride = 1,
                        Scheme scheme = Scheme::rk4) {
  IntegratorConfig c;
  c.t_end = t_end;
  c.dt = dt;
  c.snapshot_stride = stride;
  c.scheme = scheme;
  return c;
}

double final_radius(const Scenario& s, const FlowTrajectory& traj) {
  return s.radii(traj.snapshots.back().embedding())[0];
}

/// Delegates to another provider for a fixed number of calls, then poisons the halo.
class FailingProvider : public BoundaryProvider {
 public:
  FailingProvider(std::shared_ptr<const BoundaryProvider> inner, int healthy)
      : inner_(std::move(inner)), healthy_(healthy) {}
  void fill_embedding(TensorField& x) const override {
    if (calls_++ < healthy_) {
      inner_->fill_embedding(x);
      return;
    }
    for (std::size_t k = 0; k < x.node_count(); ++k) {
      if (!x.grid().in_band(k)) {
        for (double& v : x.node(k)) v = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  void fill_metric(TensorField& g) const override { inner_->fill_metric(g); }

 private:
  std::shared_ptr<const BoundaryProvider> inner_;
  int healthy_;
  mutable int calls_ = 0;
};

}  // namespace

TEST_CASE("schedule hits t_end exactly with a whole number of strides") {
  const Schedule s = resolve_schedule(config(0.1, std::nullopt, 7), 0.003, 0.006, std::nullopt);
  CHECK(s.steps % 7 == 0);
  CHECK(s.dt <= 0.003);
  CHECK(s.dt * static_cast<double>(s.steps) == doctest::Approx(0.1).epsilon(1e-14));

  const Schedule e = resolve_schedule(config(0.1, 0.001), 0.003, 0.006, std::nullopt);
  CHECK(e.steps == 100);
  CHECK(e.dt == doctest::Approx(0.001));
}

TEST_CASE("explicit dt above the stability bound raises TimestepError") {
  try {
    resolve_schedule(config(0.1, 0.01), 0.003, 0.006, std::nullopt);
    FAIL("expected TimestepError");
  } catch (const TimestepError& e) {
    CHECK(e.suggested_dt() == 0.003);
  }
}

TEST_CASE("extinction guard and invalid integrator settings") {
  CHECK_THROWS_AS(resolve_schedule(config(0.21), 1e-3, 2e-3, 0.25), ConfigError);
  CHECK_NOTHROW(resolve_schedule(config(0.2), 1e-3, 2e-3, 0.25));
  CHECK_THROWS_AS(resolve_schedule(config(-1.0), 1e-3, 2e-3, std::nullopt), ConfigError);
  CHECK_THROWS_AS(resolve_schedule(config(0.1, std::nullopt, 0), 1e-3, 2e-3, std::nullopt),
                  ConfigError);
  IntegratorConfig c = config(0.1);
  c.cfl_safety = 1.5;
  CHECK_THROWS_AS(resolve_schedule(c, 1e-3, 2e-3, std::nullopt), ConfigError);
  CHECK_THROWS_AS(integrate_mcf(sphere(16), config(0.3), FdOrder::second), ConfigError);
}

TEST_CASE("scheme names round trip") {
  CHECK(parse_scheme("rk4") == Scheme::rk4);
  CHECK(parse_scheme(scheme_name(Scheme::explicit_euler)) == Scheme::explicit_euler);
  CHECK_THROWS_AS(parse_scheme("leapfrog"), ConfigError);
}

TEST_CASE("suggested dt scales with h squared and the safety factor") {
  const Scenario a = torus(32);
  const Scenario b = torus(64);
  const double da = suggest_dt(*a.embedding, 0.5, FdOrder::second);
  const double db = suggest_dt(*b.embedding, 0.5, FdOrder::second);
  CHECK(db / da == doctest::Approx(0.25).epsilon(0.02));
  CHECK(suggest_dt(*a.embedding, 0.25, FdOrder::second) == doctest::Approx(0.5 * da));
}

TEST_CASE("plane is stationary under mean curvature flow") {
  ScenarioSpec spec;
  spec.name = "plane";
  spec.counts = {16};
  const Scenario s = make_scenario(spec);
  const FlowTrajectory traj = integrate_mcf(s, config(0.01), FdOrder::second);
  const TensorField drift = traj.snapshots.back().embedding().x() - s.embedding->x();
  CHECK(norms(drift, residual_nodes(*s.grid, FdOrder::second)).linf <= 1e-12);
}

TEST_CASE("mcf requires an embedding") {
  CHECK_THROWS_AS(integrate_mcf(random_torus(2, 8), config(0.01), FdOrder::second), ConfigError);
}

TEST_CASE("trajectory snapshots are equally spaced in time") {
  const FlowTrajectory traj = integrate_mcf(flat_torus(16), config(0.1, std::nullopt, 2),
                                            FdOrder::second);
  REQUIRE(traj.snapshots.size() >= 3);
  CHECK_FALSE(traj.degenerated);
  CHECK(traj.snapshots.back().t == doctest::Approx(0.1).epsilon(1e-14));
  const double spacing = traj.snapshot_spacing();
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
    CHECK(traj.snapshots[i].t > traj.snapshots[i - 1].t);
    CHECK(traj.snapshots[i].t - traj.snapshots[i - 1].t == doctest::Approx(spacing).epsilon(1e-10));
  }
}

TEST_CASE("flat torus radii shrink like sqrt(r^2 - 2t) and stay flat") {
  const Scenario s = flat_torus(32, 1.0, 1.2);
  const FlowTrajectory traj = integrate_mcf(s, config(0.1, std::nullopt, 20), FdOrder::fourth);
  for (const FlowState& st : traj.snapshots) {
    const auto r = s.radii(st.embedding());
    const auto exact = s.oracles.flow_radii(st.t);
    CHECK(r[0] == doctest::Approx(exact[0]).epsilon(1e-5));
    CHECK(r[1] == doctest::Approx(exact[1]).epsilon(1e-5));
    const TensorField riem =
        riemann_covariant(induced_metric(st.embedding(), FdOrder::fourth), FdOrder::fourth);
    CHECK(norms(riem).linf <= 1e-9);
  }
}

TEST_CASE("time integrators converge at their order against a fine reference") {
  // Same grid for every run, so the spatial error cancels in the comparison.
  const Scenario s = flat_torus(16, 1.0, 1.3);
  const double t_end = 0.1;
  const double base = 0.02;
  auto radius = [&](Scheme scheme, double dt) {
    return final_radius(s, integrate_mcf(s, config(t_end, dt, 1, scheme), FdOrder::second));
  };
  const double ref = radius(Scheme::rk4, base / 16.0);

  const double e1 = std::abs(radius(Scheme::explicit_euler, base) - ref);
  const double e2 = std::abs(radius(Scheme::explicit_euler, base / 2.0) - ref);
  CHECK(order(e1, e2) == doctest::Approx(1.0).epsilon(0.1));

  const double r1 = std::abs(radius(Scheme::rk4, base) - ref);
  const double r2 = std::abs(radius(Scheme::rk4, base / 2.0) - ref);
  CHECK(order(r1, r2) >= 3.5);
}

TEST_CASE("shrinking sphere tracks the exact radius") {
  const Scenario s = sphere(32, FdOrder::fourth);
  const FlowTrajectory traj = integrate_mcf(s, config(0.05, std::nullopt, 100), FdOrder::fourth);
  CHECK_FALSE(traj.degenerated);
  for (const FlowState& st : traj.snapshots) {
    const double exact = s.oracles.flow_radii(st.t)[0];
    CHECK(s.radii(st.embedding())[0] == doctest::Approx(exact).epsilon(1e-4));
  }
}

TEST_CASE("ricci flow leaves a flat metric unchanged") {
  const Scenario s = flat_torus(16, 1.0, 2.0);
  const FlowTrajectory traj = integrate_ricci_flow(s, config(0.05), FdOrder::second);
  CHECK(norms(traj.snapshots.back().metric().g() - s.initial_metric(FdOrder::second).g()).linf ==
        0.0);
}

TEST_CASE("ricci flow on the round sphere shrinks like r^2 = 1 - 2t") {
  const Scenario s = sphere(32, FdOrder::fourth);
  const FlowTrajectory traj = integrate_ricci_flow(s, config(0.05, std::nullopt, 50), FdOrder::fourth);
  const auto nodes = residual_nodes(*s.grid, FdOrder::fourth);
  for (const FlowState& st : traj.snapshots) {
    const CurvaturePack cp = curvature_pack(st.metric(), FdOrder::fourth);
    const double exact = s.oracles.ricci_flow_scalar_curvature(st.t);
    CHECK(exact == doctest::Approx(2.0 / (1.0 - 2.0 * st.t)));
    for (std::size_t k : nodes) REQUIRE(cp.scalar(k, 0) == doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("a degenerating flow keeps the accepted snapshots and a message") {
  const Scenario base = sphere(16);
  std::vector<AxisSpec> axes;
  for (int a = 0; a < base.grid->dim(); ++a) axes.push_back(base.grid->axis(a));
  auto grid = std::make_shared<ChartGrid>(
      axes, std::make_shared<FailingProvider>(base.grid->boundary_provider(), 12));
  TensorField x(grid, {}, 3);
  x.data() = base.embedding->x().data();
  Scenario s = base;
  s.grid = grid;
  s.embedding.emplace(std::move(x), AmbientSignature::euclidean(3));

  const FlowTrajectory traj = integrate_mcf(s, config(0.02), FdOrder::second);
  CHECK(traj.degenerated);
  CHECK_FALSE(traj.degeneration.empty());
  CHECK(traj.snapshots.size() >= 2);
  CHECK(traj.snapshots.size() < static_cast<std::size_t>(traj.schedule.steps) + 1);
}
