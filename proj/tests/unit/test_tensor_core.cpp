#include <doctest.h>

#include <array>
#include <cmath>

#include "curvflow/curvature.hpp"
#include "curvflow/derivative.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/metric.hpp"
#include "curvflow/verify.hpp"
#include "test_support.hpp"

using namespace curvflow;
using namespace curvflow::testing;

namespace {

double max_abs_diff(const TensorField& a, const TensorField& b, std::span<const std::size_t> nodes) {
  return norms(a - b, nodes).linf;
}

TensorField oracle_riemann(const Scenario& s) {
  return sample(s.grid, std::vector<Variance>(4, Variance::covariant), 1,
                [&](std::span<const double> x, std::span<double> r) { s.oracles.riemann(x, r); });
}

double riemann_error(int n, FdOrder p) {
  const Scenario s = torus(n, p);
  const MetricField m = s.initial_metric(p);
  const auto nodes = residual_nodes(*s.grid, p);
  return max_abs_diff(riemann_covariant(m, p), oracle_riemann(s), nodes);
}

}  // namespace

TEST_CASE("fd weights reproduce the textbook stencils") {
  const std::array<int, 3> three{-1, 0, 1};
  const auto d1 = fd_weights(three, 1);
  CHECK(d1[0] == doctest::Approx(-0.5));
  CHECK(d1[1] == doctest::Approx(0.0));
  CHECK(d1[2] == doctest::Approx(0.5));
  const auto d2 = fd_weights(three, 2);
  CHECK(d2[0] == doctest::Approx(1.0));
  CHECK(d2[1] == doctest::Approx(-2.0));
  CHECK(d2[2] == doctest::Approx(1.0));

  const std::array<int, 5> five{-2, -1, 0, 1, 2};
  const auto c1 = fd_weights(five, 1);
  CHECK(c1[0] == doctest::Approx(1.0 / 12.0));
  CHECK(c1[1] == doctest::Approx(-2.0 / 3.0));
  CHECK(c1[3] == doctest::Approx(2.0 / 3.0));
  CHECK(c1[4] == doctest::Approx(-1.0 / 12.0));
  const auto c2 = fd_weights(five, 2);
  CHECK(c2[0] == doctest::Approx(-1.0 / 12.0));
  CHECK(c2[2] == doctest::Approx(-5.0 / 2.0));

  // one-sided: forward difference
  const std::array<int, 2> fwd{0, 1};
  const auto f1 = fd_weights(fwd, 1);
  CHECK(f1[0] == doctest::Approx(-1.0));
  CHECK(f1[1] == doctest::Approx(1.0));
}

TEST_CASE("grid index round trip and band masks") {
  std::vector<AxisSpec> axes{{8, 1.0, 0.1, BoundaryMode::ghost, 2},
                             {6, 1.0, 0.0, BoundaryMode::periodic, 0}};
  struct NullProvider : BoundaryProvider {
    void fill_embedding(TensorField&) const override {}
    void fill_metric(TensorField&) const override {}
  };
  const ChartGrid g(axes, std::make_shared<NullProvider>());
  CHECK(g.extent(0) == 12);
  CHECK(g.node_count() == 72);
  CHECK(g.has_ghost_axes());
  for (std::size_t k = 0; k < g.node_count(); ++k) CHECK(g.ravel(g.unravel(k)) == k);
  CHECK(g.band_nodes().size() == 48);
  CHECK(g.interior_nodes(2).size() == 24);
  CHECK(g.coordinate(0, 2) == doctest::Approx(0.1));
  CHECK_FALSE(g.in_band(0));
}

TEST_CASE("multi-index table digits and replacement") {
  const MultiIndexTable t(3, 2);
  CHECK(t.size() == 9);
  CHECK(t.digit(5, 0) == 1);
  CHECK(t.digit(5, 1) == 2);
  CHECK(t.replace(5, 0, 2) == 8);
}

TEST_CASE("tensor arithmetic rejects mismatched shapes") {
  const auto grid = periodic_grid(2, 8);
  TensorField a = TensorField::covariant(grid, 1);
  const TensorField b = TensorField::covariant(grid, 2);
  CHECK_THROWS_AS(a += b, ShapeError);
  const TensorField c = TensorField::covariant(periodic_grid(2, 10), 1);
  CHECK_THROWS_AS(a -= c, ShapeError);
}

TEST_CASE("norms of a known field") {
  const auto grid = periodic_grid(1, 4);
  TensorField f = TensorField::covariant(grid, 1);
  for (std::size_t k = 0; k < 4; ++k) f(k, 0) = (k % 2 == 0) ? 3.0 : -3.0;
  const Norms n = norms(f);
  CHECK(n.linf == 3.0);
  CHECK(n.l2 == doctest::Approx(3.0));
  CHECK(n.nodes == 4);
}

TEST_CASE("periodic first derivative converges at the stencil order") {
  for (FdOrder p : {FdOrder::second, FdOrder::fourth}) {
    std::array<double, 2> err{};
    for (int i = 0; i < 2; ++i) {
      const auto grid = periodic_grid(1, 32 << i);
      const TensorField f = sample_scalar(grid, [](auto x) { return std::sin(kTwoPi * x[0]); });
      const TensorField exact =
          sample_scalar(grid, [](auto x) { return kTwoPi * std::cos(kTwoPi * x[0]); });
      err[i] = norms(partial_derivative(f, 0, p) - exact).linf;
    }
    CHECK(order(err[0], err[1]) == doctest::Approx(static_cast<int>(p)).epsilon(0.05));
  }
}

TEST_CASE("constant fields differentiate to exactly zero") {
  const auto grid = periodic_grid(2, 16);
  const TensorField f = sample_scalar(grid, [](auto) { return 2.5; });
  for (FdOrder p : {FdOrder::second, FdOrder::fourth}) {
    CHECK(norms(partial_derivative(f, 1, p)).linf == 0.0);
    CHECK(norms(second_partial(f, 0, 1, p)).linf == 0.0);
  }
}

TEST_CASE("mixed second partial is exactly symmetric") {
  const auto grid = periodic_grid(2, 16);
  const TensorField f = sample_scalar(
      grid, [](auto x) { return std::sin(kTwoPi * x[0]) * std::cos(2.0 * kTwoPi * x[1]) + x[0]; });
  const TensorField a = second_partial(f, 0, 1, FdOrder::fourth);
  const TensorField b = second_partial(f, 1, 0, FdOrder::fourth);
  CHECK(a.data() == b.data());
}

TEST_CASE("laplace-beltrami on a flat periodic metric") {
  for (FdOrder p : {FdOrder::second, FdOrder::fourth}) {
    std::array<double, 2> err{};
    for (int i = 0; i < 2; ++i) {
      const auto grid = periodic_grid(2, 16 << i);
      const MetricField m(sample(grid, {Variance::covariant, Variance::covariant}, 1,
                                 [](auto, std::span<double> g) {
                                   g[0] = 1.0;
                                   g[1] = g[2] = 0.0;
                                   g[3] = 1.0;
                                 }));
      const TensorField c = sample_scalar(grid, [](auto) { return 1.0; });
      CHECK(norms(laplace_beltrami(c, m, p)).linf == 0.0);
      const TensorField f = sample_scalar(grid, [](auto x) { return std::sin(kTwoPi * x[0]); });
      const TensorField exact = -(kTwoPi * kTwoPi) * f;
      err[i] = norms(laplace_beltrami(f, m, p) - exact).linf;
    }
    CHECK(order(err[0], err[1]) >= static_cast<int>(p) - 0.1);
  }
}

TEST_CASE("metric inverse and determinant") {
  const auto grid = periodic_grid(3, 4);
  const MetricField m(sample(grid, std::vector<Variance>(2, Variance::covariant), 1,
                             [](std::span<const double> x, std::span<double> g) {
                               const double a = 2.0 + std::sin(kTwoPi * x[0]);
                               const double b = 0.3 * std::cos(kTwoPi * x[1]);
                               const double G[9] = {a, b, 0.1, b, 1.5, 0.2, 0.1, 0.2, 1.0};
                               std::copy(G, G + 9, g.begin());
                             }));
  for (std::size_t k = 0; k < grid->node_count(); ++k) {
    const auto g = m.g().node(k);
    const auto gi = m.inverse().node(k);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l) s += g[3 * i + l] * gi[3 * l + j];
        CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      }
    }
  }
  CHECK(m.det()[0] > 0.0);
}

TEST_CASE("metric degeneracy is reported with the node") {
  const auto grid = periodic_grid(2, 4);
  auto build = [&](double lower) {
    return sample(grid, {Variance::covariant, Variance::covariant}, 1,
                  [lower](std::span<const double> x, std::span<double> g) {
                    g[0] = 1.0;
                    g[1] = g[2] = 0.0;
                    g[3] = x[0] > 0.4 ? lower : 1.0;
                  });
  };
  CHECK_THROWS_AS(MetricField(build(0.0)), DegenerateMetricError);
  CHECK_THROWS_AS(MetricField(build(-1.0)), DegenerateMetricError);
  CHECK_NOTHROW(MetricField(build(-1.0), false));
  try {
    MetricField bad(build(0.0));
  } catch (const DegenerateMetricError& e) {
    CHECK(node_coordinates(*grid, e.node())[0] > 0.4);
  }
}

TEST_CASE("raising then lowering an index is the identity") {
  const Scenario s = random_torus(3, 8);
  const MetricField m = s.initial_metric(FdOrder::second);
  const CurvaturePack cp = curvature_pack(m, FdOrder::second);
  const TensorField back = lower_index(raise_index(cp.riemann, m, 2), m, 2);
  CHECK(norms(back - cp.riemann).linf <= 1e-12 * norms(cp.riemann).linf);
}

TEST_CASE("christoffel symbols are exactly symmetric in the lower pair") {
  const Scenario s = random_torus(3, 8);
  const TensorField gamma = christoffel(s.initial_metric(FdOrder::fourth), FdOrder::fourth);
  const int n = 3;
  for (std::size_t k = 0; k < s.grid->node_count(); ++k) {
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          REQUIRE(gamma(k, gamma.index({a, i, j})) == gamma(k, gamma.index({a, j, i})));
        }
      }
    }
  }
}

TEST_CASE("flat metric has exactly vanishing curvature") {
  const Scenario s = flat_torus(16, 1.0, 2.0);
  const MetricField m = s.initial_metric(FdOrder::second);
  CHECK(norms(riemann_covariant(m, FdOrder::second)).linf == 0.0);
}

TEST_CASE("riemann of the torus metric converges to the closed form") {
  for (FdOrder p : {FdOrder::second, FdOrder::fourth}) {
    const double e32 = riemann_error(32, p);
    const double e64 = riemann_error(64, p);
    CHECK(order(e32, e64) >= static_cast<int>(p) - 0.5);
  }
}

TEST_CASE("riemann symmetries hold to discretization error and converge") {
  for (FdOrder p : {FdOrder::second, FdOrder::fourth}) {
    std::array<RiemannSymmetryDefects, 2> d;
    for (int i = 0; i < 2; ++i) {
      const Scenario s = torus(32 << i, p);
      d[i] = riemann_symmetry_defects(riemann_covariant(s.initial_metric(p), p), p);
    }
    auto converges = [&](const Norms& c, const Norms& f) {
      if (c.linf <= 1e-12) return f.linf <= 1e-12;
      return order(c.linf, f.linf) >= static_cast<int>(p) - 0.5;
    };
    CHECK(converges(d[0].antisym_first, d[1].antisym_first));
    CHECK(converges(d[0].antisym_second, d[1].antisym_second));
    CHECK(converges(d[0].pair_exchange, d[1].pair_exchange));
    CHECK(converges(d[0].first_bianchi, d[1].first_bianchi));
  }
}

TEST_CASE("mixed and covariant riemann routes agree") {
  std::array<double, 2> err{};
  for (int i = 0; i < 2; ++i) {
    const Scenario s = torus(32 << i);
    const MetricField m = s.initial_metric(FdOrder::second);
    const TensorField gamma = christoffel(m, FdOrder::second);
    // R^k_lij lowered on slot 0 gives R_klij
    const TensorField lowered = lower_index(riemann_mixed(m, gamma, FdOrder::second), m, 0);
    err[i] = norms(lowered - riemann_covariant(m, gamma, FdOrder::second),
                   residual_nodes(*s.grid, FdOrder::second))
                 .linf;
  }
  CHECK(order(err[0], err[1]) >= 1.5);
}

TEST_CASE("metric compatibility holds exactly for the discrete connection") {
  // Gamma is built from the same first differences, so nabla g cancels term by term.
  for (FdOrder p : {FdOrder::second, FdOrder::fourth}) {
    for (int d : {2, 3}) {
      const Scenario s = random_torus(d, 12);
      const MetricField m = s.initial_metric(p);
      CHECK(metric_compatibility_residual(m, p).linf <= 1e-12);
    }
    const Scenario t = torus(32, p);
    CHECK(metric_compatibility_residual(t.initial_metric(p), p).linf <= 1e-12);
  }
}

TEST_CASE("ricci identity converges and second bianchi holds to roundoff") {
  std::array<double, 2> ricci{};
  for (int i = 0; i < 2; ++i) {
    const Scenario s = torus(32 << i);
    const MetricField m = s.initial_metric(FdOrder::second);
    const TensorField v = sample(s.grid, {Variance::covariant}, 1,
                                 [](std::span<const double> x, std::span<double> w) {
                                   w[0] = std::sin(x[0]) + 0.5 * std::cos(2.0 * x[1]);
                                   w[1] = std::cos(x[0] - x[1]);
                                 });
    ricci[i] = ricci_identity_residual(v, m, FdOrder::second).linf;
    const TensorField riem = riemann_covariant(m, FdOrder::second);
    CHECK(bianchi_residual(riem, m, FdOrder::second).linf <= 1e-10 * norms(riem).linf);
  }
  CHECK(order(ricci[0], ricci[1]) >= 1.5);
}

TEST_CASE("second bianchi residual decays at order p in 3D") {
  // in 2D it vanishes by symmetry; in 3D the components are independent
  std::array<double, 2> res{};
  for (int i = 0; i < 2; ++i) {
    const Scenario r = random_torus(3, 12 << i);
    const MetricField m = r.initial_metric(FdOrder::second);
    res[i] = bianchi_residual(riemann_covariant(m, FdOrder::second), m, FdOrder::second).linf;
  }
  CHECK(order(res[0], res[1]) >= 1.5);
}

TEST_CASE("covariant derivative obeys the Leibniz rule") {
  std::array<double, 2> err{};
  for (int i = 0; i < 2; ++i) {
    const Scenario s = torus(32 << i);
    const FdOrder p = FdOrder::second;
    const MetricField m = s.initial_metric(p);
    const TensorField gamma = christoffel(m, p);
    const TensorField f = sample_scalar(s.grid, [](auto x) { return 1.0 + 0.3 * std::sin(x[0] + x[1]); });
    const TensorField v = sample(s.grid, {Variance::covariant}, 1,
                                 [](std::span<const double> x, std::span<double> w) {
                                   w[0] = std::cos(x[1]);
                                   w[1] = std::sin(2.0 * x[0]);
                                 });
    TensorField fv = v;
    for (std::size_t k = 0; k < fv.node_count(); ++k) {
      for (std::size_t c = 0; c < 2; ++c) fv(k, c) *= f(k, 0);
    }
    const TensorField lhs = covariant_derivative(fv, gamma, p);
    const TensorField df = covariant_derivative(f, gamma, p);
    const TensorField dv = covariant_derivative(v, gamma, p);
    TensorField rhs = dv;
    for (std::size_t k = 0; k < rhs.node_count(); ++k) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          rhs(k, rhs.index({a, b})) =
              df(k, a) * v(k, b) + f(k, 0) * dv(k, dv.index({a, b}));
        }
      }
    }
    err[i] = norms(lhs - rhs).linf;
  }
  CHECK(err[1] < err[0]);
  CHECK(order(err[0], err[1]) >= 1.5);
}

TEST_CASE("ricci and scalar are the contractions of riemann") {
  for (int d : {2, 3, 4}) {
    const Scenario s = random_torus(d, d == 4 ? 6 : 10);
    const CurvaturePack cp = curvature_pack(s.initial_metric(FdOrder::second), FdOrder::second);
    CHECK(pack_contraction_defect(cp) <= 1e-12);
  }
}

TEST_CASE("full contraction of the metric with itself is the dimension") {
  const Scenario s = random_torus(3, 6);
  const MetricField m = s.initial_metric(FdOrder::second);
  const TensorField tr = full_contraction(m.g(), m.g(), m);
  for (std::size_t k = 0; k < tr.node_count(); ++k) CHECK(tr(k, 0) == doctest::Approx(3.0));
}
