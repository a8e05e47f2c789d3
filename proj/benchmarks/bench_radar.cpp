#include <benchmark/benchmark.h>

#include "sigradar/radar.hpp"
#include "sigradar/synth.hpp"

using namespace sigradar;

namespace {

// End-to-end walk-forward on a small scenario, LASSO only, by thread count.
void bm_radar_lasso(benchmark::State& state) {
  ScenarioSpec spec;
  spec.n_assets = 20;
  spec.n_quarters = 8;
  spec.noise_sd = 0.01;
  const Scenario sc = generate(spec);
  const MarketData data = make_market_data(sc.assets, sc.markets, sc.calendar);
  RadarConfig cfg;
  cfg.algorithms = {Algorithm::lasso};
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_radar(data, cfg).forecasts.size());
}
BENCHMARK(bm_radar_lasso)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
