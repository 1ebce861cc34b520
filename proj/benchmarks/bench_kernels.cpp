#include <benchmark/benchmark.h>

#include <numbers>

#include "codazzi/metric.hpp"
#include "codazzi/reconstruct.hpp"
#include "codazzi/solver.hpp"

using namespace codazzi;

namespace {

SolverConfig helicoid_config(std::size_t n) {
  SolverConfig c;
  c.t_end = 0.1;
  c.n_space = n;
  c.n_time = 1;
  c.epsilon = 0.05;
  c.region_policy = RegionPolicy::record;
  return c;
}

void BM_ViscousRhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SolverConfig c = helicoid_config(n);
  const Metric m = isothermal_helicoid(1.0);
  const StripGrid g = c.strip();
  const MetricSlice slice = metric_slice(m, g, 0.5);
  const RiemannRow row = perturbed_row(c.region(), n, 3, 0.02, 1);
  for (auto _ : state) benchmark::DoNotOptimize(viscous_rhs(row, slice, g.ds, c.epsilon, c.orientation));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_ViscousRhs)->Arg(256)->Arg(1024)->Arg(4096);

void BM_March(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SolverConfig c = helicoid_config(n);
  const Metric m = isothermal_helicoid(1.0);
  const RiemannRow row = perturbed_row(c.region(), n, 3, 0.02, 1);
  std::size_t steps = 0;
  for (auto _ : state) {
    const Trajectory t = march(c, m, row);
    steps += t.diag.steps;
    benchmark::DoNotOptimize(t.w.wp.data.data());
  }
  state.counters["steps"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_March)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_IntegrateFrame(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Metric m = isothermal_helicoid(1.0);
  StripGrid g;
  g.rows = 4 * n;
  g.cols = n;
  g.dt = 2.0 / static_cast<double>(g.rows - 1);
  g.s0 = -std::numbers::pi;
  g.ds = 2 * std::numbers::pi / static_cast<double>(n);
  const HFields h{Grid(g.rows, g.cols, -1.0), Grid(g.rows, g.cols, 0.0), Grid(g.rows, g.cols, 1.0)};
  for (auto _ : state) {
    SurfacePatch p = integrate_frame(m, g, h, 0, n / 2);
    integrate_position(p);
    benchmark::DoNotOptimize(p.r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.rows * g.cols));
}
BENCHMARK(BM_IntegrateFrame)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
