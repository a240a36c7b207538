// Weighting-path benchmarks: discriminative and Gaussian domain weights and
// the full hybrid combination.

#include <benchmark/benchmark.h>

#include "iwtl/density_ratio.hpp"
#include "iwtl/pipeline.hpp"
#include "iwtl/synth.hpp"

namespace {

iwtl::SynthOutput make_data(Eigen::Index n_source) {
  iwtl::ShiftScenario scenario;
  scenario.n_source = n_source;
  scenario.n_target_train = 200;
  scenario.n_target_test = 100;
  scenario.positive_rate_source = 0.2;
  scenario.positive_rate_target = 0.2;
  scenario.seed = 23;
  return iwtl::synth_shift(scenario);
}

void BM_fit_domain_discriminator(benchmark::State& state) {
  const auto data = make_data(state.range(0));
  for (auto _ : state) {
    const iwtl::LinearDiscriminator disc =
        iwtl::fit_domain_discriminator(data.source, data.target_train, 1.0, true);
    benchmark::DoNotOptimize(disc.c_lr);
  }
}
BENCHMARK(BM_fit_domain_discriminator)
    ->Arg(1000)
    ->Arg(5000)
    ->Unit(benchmark::kMillisecond);

void BM_domain_weight_eval(benchmark::State& state) {
  const auto data = make_data(5000);
  const iwtl::LinearDiscriminator disc =
      iwtl::fit_domain_discriminator(data.source, data.target_train, 1.0, true);
  for (auto _ : state) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < data.source.n(); ++i)
      sum += iwtl::domain_weight(disc, data.source.x.row(i).transpose());
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * data.source.n());
}
BENCHMARK(BM_domain_weight_eval)->Unit(benchmark::kMillisecond);

void BM_gaussian_fit_and_eval(benchmark::State& state) {
  const auto data = make_data(5000);
  for (auto _ : state) {
    const iwtl::GaussianDomainModel model =
        iwtl::fit_gaussian_model(data.source, data.target_train, 1e-3);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < data.source.n(); ++i)
      sum += iwtl::gaussian_weight(model, data.source.x.row(i).transpose());
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * data.source.n());
}
BENCHMARK(BM_gaussian_fit_and_eval)->Unit(benchmark::kMillisecond);

void BM_build_hybrid_weights(benchmark::State& state) {
  const auto data = make_data(state.range(0));
  const iwtl::PipelineConfig cfg;
  for (auto _ : state) {
    const iwtl::HybridWeightDetail detail =
        iwtl::build_hybrid_weights(data.source, data.target_train, cfg);
    benchmark::DoNotOptimize(detail.final.values.sum());
  }
}
BENCHMARK(BM_build_hybrid_weights)
    ->Arg(1000)
    ->Arg(5000)
    ->Unit(benchmark::kMillisecond);

}  // namespace
