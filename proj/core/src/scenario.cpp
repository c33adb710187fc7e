#include "curvflow/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

constexpr double kPi = std::numbers::pi;

double param(const ParamMap& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::string& scenario, const ParamMap& p,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : p) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("scenario '" + scenario + "' has no parameter '" + key + "'");
    }
  }
}

std::vector<int> resolve_counts(const std::vector<int>& counts, int dim, int fallback) {
  if (counts.empty()) return std::vector<int>(dim, fallback);
  if (counts.size() == 1) return std::vector<int>(dim, counts[0]);
  if (static_cast<int>(counts.size()) != dim) {
    throw ConfigError("expected " + std::to_string(dim) + " grid counts, got " +
                      std::to_string(counts.size()));
  }
  return counts;
}

template <class F>
TensorField sample(const GridPtr& grid, std::vector<Variance> var, int ambient, F&& f) {
  TensorField out(grid, std::move(var), ambient);
  for (std::size_t k = 0; k < out.node_count(); ++k) {
    const auto x = node_coordinates(*grid, k);
    f(std::span<const double>(x), out.node(k));
  }
  return out;
}

// Halo on each side of a sphere band axis: wide enough for centered stencils
// at the band edge, narrow enough to keep clear of the pole.
int band_halo(double theta0, double h, FdOrder p) {
  const int s = stencil_radius(p);
  const int fit = static_cast<int>(std::floor(theta0 / (2.0 * h)));
  return std::clamp(fit, s, 3 * s);
}

// Continues the band's deviation from a reference field into the halo by
// linear extrapolation along each ghost axis in turn (corners are reached by
// the later axes). Halo entries of `dev` are overwritten.
void extrapolate_into_halo(TensorField& dev) {
  const ChartGrid& grid = dev.grid();
  const std::size_t width = dev.node_size();
  for (int a = 0; a < grid.dim(); ++a) {
    if (grid.mode(a) != BoundaryMode::ghost) continue;
    const int halo = grid.halo(a);
    const int last = grid.extent(a) - 1;
    const std::size_t stride = grid.stride(a);
    for (std::size_t k = 0; k < dev.node_count(); ++k) {
      const int j = grid.unravel(k)[a];
      if (j >= halo && j <= last - halo) continue;
      // distance d from the nearest band node e0, with e1 one step further in
      const bool low = j < halo;
      const int d = low ? halo - j : j - (last - halo);
      const std::size_t e0 = low ? k + d * stride : k - d * stride;
      const std::size_t e1 = low ? e0 + stride : e0 - stride;
      const double* v0 = dev.node(e0).data();
      const double* v1 = dev.node(e1).data();
      double* o = dev.node(k).data();
      for (std::size_t c = 0; c < width; ++c) o[c] = v0[c] + d * (v0[c] - v1[c]);
    }
  }
}

// Halo of a sphere band: the round sphere at the band-mean radius, plus the
// band's deviation from that round sphere continued linearly across the edge.
class SphereBandProvider final : public BoundaryProvider {
 public:
  void fill_embedding(TensorField& x) const override {
    const ChartGrid& grid = x.grid();
    const int amb = x.ambient();
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < x.node_count(); ++k) {
      if (!grid.in_band(k)) continue;
      double r2 = 0.0;
      for (double v : x.node(k)) r2 += v * v;
      sum += std::sqrt(r2);
      ++count;
    }
    const double radius = sum / static_cast<double>(count);
    TensorField round(x.grid_ptr(), x.variances(), amb);
    for (std::size_t k = 0; k < x.node_count(); ++k) {
      sphere_unit_vector(node_coordinates(grid, k), round.node(k));
    }
    round *= radius;
    fill_from(x, round);
  }

  void fill_metric(TensorField& g) const override {
    const ChartGrid& grid = g.grid();
    // g_{theta_1 theta_1} = r^2 on the round sphere
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      if (!grid.in_band(k)) continue;
      sum += g(k, 0);
      ++count;
    }
    const double r2 = sum / static_cast<double>(count);
    TensorField round(g.grid_ptr(), g.variances(), 1);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      sphere_unit_metric(node_coordinates(grid, k), round.node(k));
    }
    round *= r2;
    fill_from(g, round);
  }

 private:
  static void fill_from(TensorField& f, const TensorField& round) {
    TensorField dev = f - round;
    extrapolate_into_halo(dev);
    const ChartGrid& grid = f.grid();
    for (std::size_t k = 0; k < f.node_count(); ++k) {
      if (grid.in_band(k)) continue;
      const double* r = round.node(k).data();
      const double* d = dev.node(k).data();
      double* o = f.node(k).data();
      for (std::size_t c = 0; c < f.node_size(); ++c) o[c] = r[c] + d[c];
    }
  }
};

class PlaneProvider final : public BoundaryProvider {
 public:
  void fill_embedding(TensorField& x) const override {
    const ChartGrid& grid = x.grid();
    for (std::size_t k = 0; k < x.node_count(); ++k) {
      if (grid.in_band(k)) continue;
      const auto c = node_coordinates(grid, k);
      auto v = x.node(k);
      std::fill(v.begin(), v.end(), 0.0);
      for (int a = 0; a < grid.dim(); ++a) v[a] = c[a];
    }
  }
  void fill_metric(TensorField& g) const override {
    const ChartGrid& grid = g.grid();
    const int n = g.dim();
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      if (grid.in_band(k)) continue;
      auto v = g.node(k);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) v[i * n + j] = i == j ? 1.0 : 0.0;
      }
    }
  }
};

// Finitely many seeded Fourier modes per entry of a symmetric perturbation,
// amplitudes normalized so every row of the perturbation sums to at most 1 in
// absolute value (Gershgorin keeps delta + eps*S positive-definite for eps < 1).
class RandomMetric {
 public:
  RandomMetric(int d, double eps, std::uint64_t seed) : d_(d), eps_(eps) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    entries_.resize(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        auto& modes = entries_[i * d + j];
        double total = 0.0;
        for (int m = 0; m < kModes; ++m) {
          Mode mode{};
          do {
            for (int a = 0; a < d; ++a) mode.k[a] = static_cast<int>(std::floor(uniform() * 3.0)) - 1;
          } while (std::all_of(mode.k.begin(), mode.k.begin() + d, [](int v) { return v == 0; }));
          mode.amp = 0.2 + 0.8 * uniform();
          mode.phase = 2.0 * kPi * uniform();
          total += mode.amp;
          modes.push_back(mode);
        }
        for (auto& mode : modes) mode.amp /= total * d;
      }
    }
  }

  void value(std::span<const double> x, std::span<double> g) const {
    for (int i = 0; i < d_; ++i) {
      for (int j = i; j < d_; ++j) {
        double s = 0.0;
        for (const auto& mode : entries_[i * d_ + j]) s += mode.amp * std::cos(arg(mode, x));
        const double v = (i == j ? 1.0 : 0.0) + eps_ * s;
        g[i * d_ + j] = v;
        g[j * d_ + i] = v;
      }
    }
  }

  void derivative(std::span<const double> x, int a, std::span<double> dg) const {
    for (int i = 0; i < d_; ++i) {
      for (int j = i; j < d_; ++j) {
        double s = 0.0;
        for (const auto& mode : entries_[i * d_ + j]) {
          s -= mode.amp * mode.k[a] * std::sin(arg(mode, x));
        }
        dg[i * d_ + j] = eps_ * s;
        dg[j * d_ + i] = eps_ * s;
      }
    }
  }

 private:
  static constexpr int kModes = 3;
  struct Mode {
    std::array<int, kMaxDim> k;
    double amp;
    double phase;
  };
  double arg(const Mode& mode, std::span<const double> x) const {
    double s = mode.phase;
    for (int a = 0; a < d_; ++a) s += mode.k[a] * x[a];
    return s;
  }

  int d_;
  double eps_;
  std::vector<std::vector<Mode>> entries_;
};

void check_metric_oracle(const Scenario& s, FdOrder p) {
  if (!s.embedding || !s.oracles.metric) return;
  const MetricField m = induced_metric(*s.embedding, p);
  const int n = s.grid->dim();
  double hmax = 0.0;
  for (int a = 0; a < n; ++a) hmax = std::max(hmax, s.grid->spacing(a));
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t k : residual_nodes(*s.grid, p)) {
    s.oracles.metric(node_coordinates(*s.grid, k), g);
    for (int q = 0; q < n * n; ++q) {
      err = std::max(err, std::abs(m.g()(k, q) - g[q]));
      scale = std::max(scale, std::abs(g[q]));
    }
  }
  const double tol = (std::pow(hmax, static_cast<int>(p)) + 1e-10) * std::max(scale, 1.0);
  if (err > tol) {
    std::ostringstream msg;
    msg << "scenario '" << s.name << "': induced metric deviates from its oracle by " << err
        << " (tolerance " << tol << ")";
    throw ConfigError(msg.str());
  }
}

Scenario make_flat_torus(const ScenarioSpec& spec) {
  reject_unknown(spec.name, spec.params, {"r1", "r2"});
  const double r1 = param(spec.params, "r1", 1.0);
  const double r2 = param(spec.params, "r2", 1.0);
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw ConfigError("flat_torus radii must be positive");
  const auto counts = resolve_counts(spec.counts, 2, 64);
  auto grid = std::make_shared<ChartGrid>(std::vector<AxisSpec>{
      {counts[0], 2.0 * kPi, 0.0, BoundaryMode::periodic, 0},
      {counts[1], 2.0 * kPi, 0.0, BoundaryMode::periodic, 0}});

  Scenario s;
  s.name = spec.name;
  s.params = {{"r1", r1}, {"r2", r2}};
  s.grid = grid;
  s.embedding.emplace(sample(grid, {}, 4,
                             [&](std::span<const double> x, std::span<double> v) {
                               v[0] = r1 * std::cos(x[0]);
                               v[1] = r1 * std::sin(x[0]);
                               v[2] = r2 * std::cos(x[1]);
                               v[3] = r2 * std::sin(x[1]);
                             }),
                      AmbientSignature::euclidean(4));
  s.oracles.metric = [r1, r2](std::span<const double>, std::span<double> g) {
    g[0] = r1 * r1;
    g[1] = g[2] = 0.0;
    g[3] = r2 * r2;
  };
  s.oracles.metric_derivative = [](std::span<const double>, int, std::span<double> dg) {
    std::fill(dg.begin(), dg.end(), 0.0);
  };
  s.oracles.scalar_curvature = [](std::span<const double>) { return 0.0; };
  s.oracles.riemann = [](std::span<const double>, std::span<double> r) {
    std::fill(r.begin(), r.end(), 0.0);
  };
  // d r_i / dt = -1 / r_i
  s.oracles.flow_radii = [r1, r2](double t) {
    return std::vector<double>{std::sqrt(r1 * r1 - 2.0 * t), std::sqrt(r2 * r2 - 2.0 * t)};
  };
  s.oracles.flow_scalar_curvature = [](double) { return 0.0; };
  s.oracles.ricci_flow_scalar_curvature = [](double) { return 0.0; };
  s.oracles.flow_scalar_rate = [](double) { return 0.0; };
  s.oracles.flow_scalar_quadratic_rhs = [](double) { return 0.0; };
  s.oracles.ricci_flow_scalar_rate = [](double) { return 0.0; };
  s.oracles.extinction_time = 0.5 * std::min(r1 * r1, r2 * r2);
  s.radius_names = {"r1_mean", "r2_mean"};
  s.radii = [](const EmbeddingField& e) {
    double a = 0.0;
    double b = 0.0;
    const auto nodes = e.grid().band_nodes();
    for (std::size_t k : nodes) {
      const auto v = e.x().node(k);
      a += std::hypot(v[0], v[1]);
      b += std::hypot(v[2], v[3]);
    }
    const double n = static_cast<double>(nodes.size());
    return std::vector<double>{a / n, b / n};
  };
  return s;
}

Scenario make_torus_of_revolution(const ScenarioSpec& spec) {
  reject_unknown(spec.name, spec.params, {"a", "b"});
  const double a = param(spec.params, "a", 2.0);
  const double b = param(spec.params, "b", 0.5);
  if (!(b > 0.0) || !(b < a)) {
    throw ConfigError("torus_of_revolution requires 0 < b < a (got a=" + std::to_string(a) +
                      ", b=" + std::to_string(b) + ")");
  }
  const auto counts = resolve_counts(spec.counts, 2, 64);
  auto grid = std::make_shared<ChartGrid>(std::vector<AxisSpec>{
      {counts[0], 2.0 * kPi, 0.0, BoundaryMode::periodic, 0},
      {counts[1], 2.0 * kPi, 0.0, BoundaryMode::periodic, 0}});

  Scenario s;
  s.name = spec.name;
  s.params = {{"a", a}, {"b", b}};
  s.grid = grid;
  s.embedding.emplace(sample(grid, {}, 3,
                             [&](std::span<const double> x, std::span<double> v) {
                               const double rho = a + b * std::cos(x[1]);
                               v[0] = rho * std::cos(x[0]);
                               v[1] = rho * std::sin(x[0]);
                               v[2] = b * std::sin(x[1]);
                             }),
                      AmbientSignature::euclidean(3));
  s.oracles.metric = [a, b](std::span<const double> x, std::span<double> g) {
    const double rho = a + b * std::cos(x[1]);
    g[0] = rho * rho;
    g[1] = g[2] = 0.0;
    g[3] = b * b;
  };
  s.oracles.metric_derivative = [a, b](std::span<const double> x, int axis,
                                       std::span<double> dg) {
    std::fill(dg.begin(), dg.end(), 0.0);
    if (axis == 1) dg[0] = -2.0 * b * std::sin(x[1]) * (a + b * std::cos(x[1]));
  };
  s.oracles.scalar_curvature = [a, b](std::span<const double> x) {
    return 2.0 * std::cos(x[1]) / (b * (a + b * std::cos(x[1])));
  };
  s.oracles.riemann = [a, b](std::span<const double> x, std::span<double> r) {
    std::fill(r.begin(), r.end(), 0.0);
    const double v = b * std::cos(x[1]) * (a + b * std::cos(x[1]));
    // R_0101 = -R_1001 = -R_0110 = R_1010
    r[0b0101] = v;
    r[0b1010] = v;
    r[0b1001] = -v;
    r[0b0110] = -v;
  };
  return s;
}

Scenario make_n_sphere(const ScenarioSpec& spec, FdOrder p) {
  reject_unknown(spec.name, spec.params, {"n", "r0", "theta0"});
  const double nd = param(spec.params, "n", 2.0);
  const double r0 = param(spec.params, "r0", 1.0);
  const double theta0 = param(spec.params, "theta0", 0.3);
  const int n = static_cast<int>(nd);
  if (n != nd || n < 1 || n > kMaxDim) throw ConfigError("n_sphere dimension must be in [1, 6]");
  if (!(r0 > 0.0)) throw ConfigError("n_sphere radius must be positive");
  if (!(theta0 > 0.0) || !(theta0 < 0.5 * kPi)) {
    throw ConfigError("n_sphere band edge theta0 must lie in (0, pi/2)");
  }
  const auto counts = resolve_counts(spec.counts, n, 64);
  std::vector<AxisSpec> axes;
  for (int a = 0; a + 1 < n; ++a) {
    const double extent = kPi - 2.0 * theta0;
    const double h = extent / counts[a];
    axes.push_back({counts[a], extent, theta0 + 0.5 * h, BoundaryMode::ghost,
                    band_halo(theta0, h, p)});
  }
  axes.push_back({counts[n - 1], 2.0 * kPi, 0.0, BoundaryMode::periodic, 0});
  std::shared_ptr<const BoundaryProvider> provider;
  if (n > 1) provider = std::make_shared<SphereBandProvider>();
  auto grid = std::make_shared<ChartGrid>(std::move(axes), provider);

  Scenario s;
  s.name = spec.name;
  s.params = {{"n", nd}, {"r0", r0}, {"theta0", theta0}};
  s.grid = grid;
  s.embedding.emplace(sample(grid, {}, n + 1,
                             [&](std::span<const double> x, std::span<double> v) {
                               sphere_unit_vector(x, v);
                               for (double& c : v) c *= r0;
                             }),
                      AmbientSignature::euclidean(n + 1));
  s.oracles.metric = [r0](std::span<const double> x, std::span<double> g) {
    sphere_unit_metric(x, g);
    for (double& c : g) c *= r0 * r0;
  };
  s.oracles.scalar_curvature = [n, r0](std::span<const double>) {
    return n * (n - 1) / (r0 * r0);
  };
  s.oracles.riemann = [n, r0](std::span<const double> x, std::span<double> r) {
    std::vector<double> g(static_cast<std::size_t>(n) * n);
    sphere_unit_metric(x, g);
    const double s2 = r0 * r0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            r[((i * n + j) * n + k) * n + l] =
                s2 * (g[i * n + k] * g[j * n + l] - g[i * n + l] * g[j * n + k]);
  };
  s.oracles.flow_radii = [n, r0](double t) {
    return std::vector<double>{std::sqrt(r0 * r0 - 2.0 * n * t)};
  };
  s.oracles.flow_scalar_curvature = [n, r0](double t) {
    return n * (n - 1) / (r0 * r0 - 2.0 * n * t);
  };
  // Ricci flow: d(r^2)/dt = -2 (n - 1)
  s.oracles.ricci_flow_scalar_curvature = [n, r0](double t) {
    return n * (n - 1) / (r0 * r0 - 2.0 * (n - 1) * t);
  };
  // R = n(n-1)/r^2 with r^2 = r0^2 - 2nt; Ric.Ric = n(n-1)^2/r^4, Riem.Riem = 2n(n-1)/r^4
  s.oracles.flow_scalar_rate = [n, r0](double t) {
    const double r2 = r0 * r0 - 2.0 * n * t;
    return 2.0 * n * n * (n - 1) / (r2 * r2);
  };
  s.oracles.flow_scalar_quadratic_rhs = [n, r0](double t) {
    const double r2 = r0 * r0 - 2.0 * n * t;
    return -4.0 * n * n * (n - 1) / (r2 * r2);
  };
  s.oracles.ricci_flow_scalar_rate = [n, r0](double t) {
    const double r2 = r0 * r0 - 2.0 * (n - 1) * t;
    return 2.0 * n * (n - 1) * (n - 1) / (r2 * r2);
  };
  s.oracles.extinction_time = r0 * r0 / (2.0 * n);
  if (n > 1) s.oracles.ricci_extinction_time = r0 * r0 / (2.0 * (n - 1));
  s.radius_names = {"r_mean"};
  s.radii = [](const EmbeddingField& e) {
    double sum = 0.0;
    const auto nodes = e.grid().band_nodes();
    for (std::size_t k : nodes) {
      double r2 = 0.0;
      for (double v : e.x().node(k)) r2 += v * v;
      sum += std::sqrt(r2);
    }
    return std::vector<double>{sum / static_cast<double>(nodes.size())};
  };
  return s;
}

Scenario make_plane(const ScenarioSpec& spec, FdOrder p) {
  reject_unknown(spec.name, spec.params, {"spacing"});
  // Dyadic spacing keeps node coordinates and their differences exact.
  const double h = param(spec.params, "spacing", 0.0625);
  if (!(h > 0.0)) throw ConfigError("plane spacing must be positive");
  const auto counts = resolve_counts(spec.counts, 2, 32);
  const int halo = 3 * stencil_radius(p);
  auto grid = std::make_shared<ChartGrid>(
      std::vector<AxisSpec>{{counts[0], counts[0] * h, 0.0, BoundaryMode::ghost, halo},
                            {counts[1], counts[1] * h, 0.0, BoundaryMode::ghost, halo}},
      std::make_shared<PlaneProvider>());

  Scenario s;
  s.name = spec.name;
  s.params = {{"spacing", h}};
  s.grid = grid;
  s.embedding.emplace(sample(grid, {}, 3,
                             [](std::span<const double> x, std::span<double> v) {
                               v[0] = x[0];
                               v[1] = x[1];
                               v[2] = 0.0;
                             }),
                      AmbientSignature::euclidean(3));
  s.oracles.metric = [](std::span<const double>, std::span<double> g) {
    g[0] = g[3] = 1.0;
    g[1] = g[2] = 0.0;
  };
  s.oracles.metric_derivative = [](std::span<const double>, int, std::span<double> dg) {
    std::fill(dg.begin(), dg.end(), 0.0);
  };
  s.oracles.scalar_curvature = [](std::span<const double>) { return 0.0; };
  s.oracles.riemann = [](std::span<const double>, std::span<double> r) {
    std::fill(r.begin(), r.end(), 0.0);
  };
  s.oracles.flow_scalar_curvature = [](double) { return 0.0; };
  s.oracles.flow_scalar_rate = [](double) { return 0.0; };
  s.oracles.flow_scalar_quadratic_rhs = [](double) { return 0.0; };
  return s;
}

Scenario make_random_metric_torus(const ScenarioSpec& spec) {
  reject_unknown(spec.name, spec.params, {"d", "eps", "seed"});
  const double dd = param(spec.params, "d", 2.0);
  const double eps = param(spec.params, "eps", 0.05);
  const double seed_param = param(spec.params, "seed", static_cast<double>(spec.seed));
  const int d = static_cast<int>(dd);
  if (d != dd || d < 1 || d > kMaxDim) {
    throw ConfigError("random_metric_torus dimension must be in [1, 6]");
  }
  if (!(eps >= 0.0) || eps > 0.1) throw ConfigError("random_metric_torus eps must be in [0, 0.1]");
  if (seed_param < 0.0 || seed_param != std::floor(seed_param)) {
    throw ConfigError("random_metric_torus seed must be a non-negative integer");
  }
  const auto seed = static_cast<std::uint64_t>(seed_param);
  const auto counts = resolve_counts(spec.counts, d, d <= 2 ? 64 : (d == 3 ? 16 : 8));
  std::vector<AxisSpec> axes;
  for (int a = 0; a < d; ++a) axes.push_back({counts[a], 2.0 * kPi, 0.0, BoundaryMode::periodic, 0});

  Scenario s;
  s.name = spec.name;
  s.params = {{"d", dd}, {"eps", eps}, {"seed", static_cast<double>(seed)}};
  s.grid = std::make_shared<ChartGrid>(std::move(axes));
  auto metric = std::make_shared<RandomMetric>(d, eps, seed);
  s.oracles.metric = [metric](std::span<const double> x, std::span<double> g) {
    metric->value(x, g);
  };
  s.oracles.metric_derivative = [metric](std::span<const double> x, int a, std::span<double> dg) {
    metric->derivative(x, a, dg);
  };
  if (eps == 0.0) {
    s.oracles.scalar_curvature = [](std::span<const double>) { return 0.0; };
    s.oracles.riemann = [](std::span<const double>, std::span<double> r) {
      std::fill(r.begin(), r.end(), 0.0);
    };
  }
  return s;
}

}  // namespace

void sphere_unit_vector(std::span<const double> x, std::span<double> u) {
  const int n = static_cast<int>(x.size());
  double prod = 1.0;
  for (int a = 0; a + 1 < n; ++a) {
    u[a] = prod * std::cos(x[a]);
    prod *= std::sin(x[a]);
  }
  u[n - 1] = prod * std::cos(x[n - 1]);
  u[n] = prod * std::sin(x[n - 1]);
}

void sphere_unit_metric(std::span<const double> x, std::span<double> g) {
  const int n = static_cast<int>(x.size());
  std::fill(g.begin(), g.end(), 0.0);
  double prod = 1.0;
  for (int a = 0; a < n; ++a) {
    g[a * n + a] = prod;
    prod *= std::sin(x[a]) * std::sin(x[a]);
  }
}

std::vector<double> node_coordinates(const ChartGrid& grid, std::size_t node) {
  const auto idx = grid.unravel(node);
  std::vector<double> x(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(a, idx[a]);
  return x;
}

MetricField Scenario::initial_metric(FdOrder p) const {
  if (oracles.metric) {
    TensorField g = sample(grid, {Variance::covariant, Variance::covariant}, 1,
                           [&](std::span<const double> x, std::span<double> v) {
                             oracles.metric(x, v);
                           });
    return MetricField(std::move(g), true);
  }
  if (!embedding) throw ConfigError("scenario '" + name + "' has neither metric nor embedding");
  return induced_metric(*embedding, p);
}

std::vector<std::string> scenario_names() {
  return {"flat_torus", "n_sphere", "plane", "random_metric_torus", "torus_of_revolution"};
}

Scenario make_scenario(const ScenarioSpec& spec, FdOrder p) {
  Scenario s;
  if (spec.name == "flat_torus") {
    s = make_flat_torus(spec);
  } else if (spec.name == "torus_of_revolution") {
    s = make_torus_of_revolution(spec);
  } else if (spec.name == "n_sphere") {
    s = make_n_sphere(spec, p);
  } else if (spec.name == "plane") {
    s = make_plane(spec, p);
  } else if (spec.name == "random_metric_torus") {
    s = make_random_metric_torus(spec);
  } else {
    throw ConfigError("unknown scenario '" + spec.name + "'");
  }
  check_metric_oracle(s, p);
  return s;
}

}  // namespace curvflow
