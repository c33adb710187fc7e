#include <benchmark/benchmark.h>

#include "curvflow/curvature.hpp"
#include "curvflow/derivative.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/scenario.hpp"
#include "curvflow/verify.hpp"

using namespace curvflow;

namespace {

Scenario torus(int n, FdOrder p) {
  ScenarioSpec spec;
  spec.name = "torus_of_revolution";
  spec.counts = {n};
  Scenario s = make_scenario(spec, p);
  s.embedding->fill_halo();
  return s;
}

FdOrder order_arg(const benchmark::State& state) {
  return state.range(1) == 4 ? FdOrder::fourth : FdOrder::second;
}

}  // namespace

static void BM_PartialDerivative(benchmark::State& state) {
  const Scenario s = torus(static_cast<int>(state.range(0)), order_arg(state));
  const TensorField& x = s.embedding->x();
  for (auto _ : state) {
    benchmark::DoNotOptimize(partial_derivative(x, 0, order_arg(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.grid->node_count()));
}
BENCHMARK(BM_PartialDerivative)->Args({64, 2})->Args({128, 2})->Args({128, 4});

static void BM_Riemann(benchmark::State& state) {
  const FdOrder p = order_arg(state);
  const Scenario s = torus(static_cast<int>(state.range(0)), p);
  const MetricField m = induced_metric(*s.embedding, p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(riemann_covariant(m, p));
  }
}
BENCHMARK(BM_Riemann)->Args({64, 2})->Args({128, 2})->Args({128, 4});

static void BM_McfRhs(benchmark::State& state) {
  const FdOrder p = order_arg(state);
  const Scenario s = torus(static_cast<int>(state.range(0)), p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcf_rhs(*s.embedding, p));
  }
}
BENCHMARK(BM_McfRhs)->Args({64, 2})->Args({128, 2})->Args({128, 4});

static void BM_CurvaturePack(benchmark::State& state) {
  const FdOrder p = order_arg(state);
  const Scenario s = torus(static_cast<int>(state.range(0)), p);
  const MetricField m = induced_metric(*s.embedding, p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(curvature_pack(m, p));
  }
}
BENCHMARK(BM_CurvaturePack)->Args({64, 2})->Args({128, 2});

static void BM_Eq22Rhs(benchmark::State& state) {
  const FdOrder p = order_arg(state);
  const Scenario s = torus(static_cast<int>(state.range(0)), p);
  const CurvaturePack cp = curvature_pack(induced_metric(*s.embedding, p), p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs_eq22(cp));
  }
}
BENCHMARK(BM_Eq22Rhs)->Args({64, 2})->Args({128, 2});

BENCHMARK_MAIN();
