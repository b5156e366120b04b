#include <benchmark/benchmark.h>

#include <random>

#include "rico/planner.hpp"
#include "rico/tasker.hpp"

using namespace rico;

namespace {

void BM_PlanAcrossRoom(benchmark::State& state) {
  WorldState w;
  w.bounds = {{-4, -3}, {4, 3}};
  w.robot = {-3.2, -2.2, 0};
  w.obstacles = {{{-1.0, -3.0}, {-0.6, 1.8}}, {{1.0, -1.8}, {1.4, 3.0}}};
  for (auto _ : state) benchmark::DoNotOptimize(plan_path(w, {3.2, 2.2}));
}
BENCHMARK(BM_PlanAcrossRoom);

void BM_BuildOccupancy(benchmark::State& state) {
  WorldState w;
  w.bounds = {{-4, -3}, {4, 3}};
  for (int i = 0; i < 8; ++i) w.obstacles.push_back({{-3.5 + i * 0.9, -0.2}, {-3.2 + i * 0.9, 0.2}});
  for (auto _ : state) benchmark::DoNotOptimize(build_occupancy(w));
}
BENCHMARK(BM_BuildOccupancy);

// Submit/harmonise/complete churn with `range(0)` live tasks.
void BM_TaskerChurn(benchmark::State& state) {
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    Tasker t;
    for (int i = 0; i < state.range(0); ++i) t.submit("t", static_cast<std::int64_t>(rng() % 10));
    for (auto d = t.harmonise(); d.active; d = t.complete(*d.active)) benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TaskerChurn)->Arg(8)->Arg(64)->Arg(512);

}  // namespace
