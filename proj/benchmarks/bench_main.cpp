#include <benchmark/benchmark.h>

#include "rnwave/functionals.hpp"

using namespace rnwave;

namespace {

EvolutionConfig config(std::size_t n, int modes) {
  EvolutionConfig c;
  c.n_points = n;
  for (int l = 0; l < modes; ++l) {
    c.modes.push_back(ModeSpec{l, InitialDataSpec{InitialDataKind::TimeSymmetricGaussian, 10, 2, 1}, 1});
  }
  return c;
}

}  // namespace

static void BM_CoordinateMapBuild(benchmark::State& state) {
  const SpacetimeParams p(1, 0.5);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(CoordinateMap::build(p, -200, 200, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CoordinateMapBuild)->Arg(4001)->Arg(16001);

static void BM_Step(benchmark::State& state) {
  const auto c = config(static_cast<std::size_t>(state.range(0)), 1);
  const auto bg = make_background(c);
  const auto d = make_initial_data(c.modes[0].data, 0, *bg.map);
  ModeState s{0, 1, d.u0, d.u1};
  ModeStepper stepper(bg.effective[0].values, bg.map->spacing());
  const double dt = 0.5 * bg.map->spacing();
  for (auto _ : state) {
    stepper.step(s, dt);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Step)->Arg(16001)->Arg(64001);

static void BM_EvaluateFunctionals(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const auto c = config(16001, modes);
  const auto bg = make_background(c);
  std::vector<ModeState> states;
  std::vector<int> ls;
  for (int l = 0; l < modes; ++l) {
    const auto d = make_initial_data(c.modes[l].data, l, *bg.map);
    states.push_back(ModeState{l, 1, d.u0, d.u1});
    ls.push_back(l);
  }
  const FunctionalEvaluator eval(bg.table, ls, std::vector<double>(ls.size(), 1.0), FunctionalOptions{});
  for (auto _ : state) benchmark::DoNotOptimize(eval.evaluate(states, 5.0));
}
BENCHMARK(BM_EvaluateFunctionals)->Arg(1)->Arg(3);
BENCHMARK_MAIN();
