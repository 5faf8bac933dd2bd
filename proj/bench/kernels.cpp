#include <benchmark/benchmark.h>

#include "birkhoff/defect.hpp"
#include "birkhoff/lindblad.hpp"
#include "birkhoff/tqd_model.hpp"

using namespace birkhoff;

namespace {

const ModelParams kModel = ModelParams::defaults();

void volume_parallel(benchmark::State& state) {
  const auto grid = uniform_grid(10.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(volume_time_series(kModel, grid));
}

void volume_serial(benchmark::State& state) {
  const auto grid = uniform_grid(10.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::volume_time_series(kModel, grid));
}

void coefficients_parallel(benchmark::State& state) {
  const auto grid = uniform_grid(10.0, static_cast<int>(state.range(0)));
  const LindbladParams p{kModel, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(dephasing_coefficients_series(p, grid));
}

void coefficients_serial(benchmark::State& state) {
  const auto grid = uniform_grid(10.0, static_cast<int>(state.range(0)));
  const LindbladParams p{kModel, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(reference::dephasing_coefficients_series(p, grid));
}

DefectConfig defect_config(benchmark::State& state) {
  DefectConfig cfg;
  cfg.starts = static_cast<int>(state.range(0));
  return cfg;
}

void defect_parallel(benchmark::State& state) {
  const PhaseDampingChannel ch = channel_at(kModel, 5.31);
  const DefectConfig cfg = defect_config(state);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_ru(ch, cfg));
}

void defect_serial(benchmark::State& state) {
  const PhaseDampingChannel ch = channel_at(kModel, 5.31);
  const DefectConfig cfg = defect_config(state);
  for (auto _ : state) benchmark::DoNotOptimize(reference::nearest_ru(ch, cfg));
}

}  // namespace

BENCHMARK(volume_parallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(volume_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(coefficients_parallel)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(coefficients_serial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(defect_parallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(defect_serial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
