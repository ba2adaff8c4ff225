#include <execlab/bsde.hpp>
#include <execlab/cost.hpp>
#include <execlab/lambert_w.hpp>
#include <execlab/strategy.hpp>

#include <benchmark/benchmark.h>

using namespace execlab;

namespace {

const CoefficientModel& lambert_model() {
  static const auto m = CoefficientModel::constant(0.5, 0.0, 0.8, 1.0, 10.0);
  return m;
}

void BM_SimulatePath(benchmark::State& state) {
  const TimeGrid grid = TimeGrid::uniform(10.0, static_cast<std::size_t>(state.range(0)));
  std::uint64_t id = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(lambert_model(), grid, 1, id++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePath)->Arg(1000)->Arg(10000);

void BM_LambertW(benchmark::State& state) {
  double z = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambert_w0(z));
    z = z < 1e6 ? z * 1.37 : 0.1;
  }
}
BENCHMARK(BM_LambertW);

void BM_SolveOde(benchmark::State& state) {
  const TimeGrid grid = TimeGrid::uniform(10.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_y_ode(lambert_model(), grid));
}
BENCHMARK(BM_SolveOde)->Arg(10000);

void BM_OptimalPlanCost(benchmark::State& state) {
  const TimeGrid grid = TimeGrid::uniform(10.0, static_cast<std::size_t>(state.range(0)));
  const auto schedule = std::make_shared<const PlanSchedule>(
      plan_schedule(lambert_model(), solve_y_lambert(0.5, 0.8, 10.0, grid)));
  std::uint64_t id = 0;
  for (auto _ : state) {
    const MarketPath m = simulate_path(lambert_model(), grid, 1, id++);
    const OptimalPlan plan = optimal_plan(schedule, m, 0, 100.0, 0.0);
    const DeviationPath dev = deviation_path(lambert_model(), m, plan.x_star);
    benchmark::DoNotOptimize(pathwise_cost(plan.x_star, dev, m));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OptimalPlanCost)->Arg(1000)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
