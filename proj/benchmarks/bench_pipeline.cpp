// Scenario generation, metric computation, and alpha-selection benchmarks.

#include <benchmark/benchmark.h>

#include "iwtl/metrics.hpp"
#include "iwtl/pipeline.hpp"
#include "iwtl/rng.hpp"
#include "iwtl/synth.hpp"

namespace {

void BM_synth_shift(benchmark::State& state) {
  iwtl::ShiftScenario scenario;
  scenario.n_source = state.range(0);
  scenario.seed = 3;
  for (auto _ : state) {
    const iwtl::SynthOutput out = iwtl::synth_shift(scenario);
    benchmark::DoNotOptimize(out.source.x.sum());
  }
  state.SetItemsProcessed(
      state.iterations() *
      (scenario.n_source + scenario.n_target_train + scenario.n_target_test));
}
BENCHMARK(BM_synth_shift)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_compute_metrics(benchmark::State& state) {
  const Eigen::Index n = 100000;
  iwtl::Rng rng(11);
  Eigen::VectorXi truth(n), pred(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    truth[i] = rng.next_double() < 0.1 ? 1 : 0;
    pred[i] = rng.next_double() < 0.12 ? 1 : 0;
  }
  for (auto _ : state) {
    const iwtl::Metrics m = iwtl::compute_metrics(truth, pred);
    benchmark::DoNotOptimize(m.macro_f1);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_compute_metrics);

void BM_select_alpha(benchmark::State& state) {
  iwtl::ShiftScenario scenario;
  scenario.n_source = 1000;
  scenario.n_target_train = 100;
  scenario.n_target_test = 100;
  scenario.positive_rate_source = 0.2;
  scenario.positive_rate_target = 0.2;
  scenario.seed = 31;
  const iwtl::SynthOutput data = iwtl::synth_shift(scenario);

  iwtl::PipelineConfig cfg;
  cfg.hp.boosting_rounds = 50;
  const iwtl::WeightVector w = iwtl::weights_for_baseline(
      iwtl::BaselineKind::Hybrid, data.source, data.target_train, cfg);
  const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (auto _ : state) {
    const iwtl::AlphaSelection sel = iwtl::select_alpha(
        data.source, data.target_train, w, grid, 3, cfg.hp, scenario.seed);
    benchmark::DoNotOptimize(sel.alpha);
  }
}
BENCHMARK(BM_select_alpha)->Unit(benchmark::kMillisecond);

}  // namespace
