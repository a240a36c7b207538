// Training-speed benchmarks for the two learners on the blended objective.

#include <benchmark/benchmark.h>

#include "iwtl/learner.hpp"
#include "iwtl/synth.hpp"

namespace {

iwtl::SynthOutput make_data(Eigen::Index n_source, Eigen::Index n_target) {
  iwtl::ShiftScenario scenario;
  scenario.n_source = n_source;
  scenario.n_target_train = n_target;
  scenario.n_target_test = 100;
  scenario.positive_rate_source = 0.2;
  scenario.positive_rate_target = 0.2;
  scenario.seed = 17;
  return iwtl::synth_shift(scenario);
}

iwtl::WeightVector unit_weights(Eigen::Index n) {
  iwtl::WeightVector w;
  w.values = Eigen::VectorXd::Ones(n);
  return w;
}

void BM_train_blend_stumps(benchmark::State& state) {
  const auto data = make_data(state.range(0), 200);
  const iwtl::WeightVector w = unit_weights(data.source.n());
  iwtl::Hyperparams hp;
  hp.learner = iwtl::LearnerKind::BoostedStumps;
  hp.boosting_rounds = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const iwtl::Model m =
        iwtl::train_blend(data.target_train, data.source, w, 0.5, hp);
    benchmark::DoNotOptimize(m.stumps.size());
  }
  state.SetItemsProcessed(state.iterations() *
                          (data.source.n() + data.target_train.n()));
}
BENCHMARK(BM_train_blend_stumps)
    ->Args({1000, 50})
    ->Args({1000, 200})
    ->Args({5000, 200})
    ->Unit(benchmark::kMillisecond);

void BM_train_blend_logreg(benchmark::State& state) {
  const auto data = make_data(state.range(0), 200);
  const iwtl::WeightVector w = unit_weights(data.source.n());
  iwtl::Hyperparams hp;
  hp.learner = iwtl::LearnerKind::LogReg;
  for (auto _ : state) {
    const iwtl::Model m =
        iwtl::train_blend(data.target_train, data.source, w, 0.5, hp);
    benchmark::DoNotOptimize(m.intercept);
  }
  state.SetItemsProcessed(state.iterations() *
                          (data.source.n() + data.target_train.n()));
}
BENCHMARK(BM_train_blend_logreg)
    ->Args({1000})
    ->Args({5000})
    ->Unit(benchmark::kMillisecond);

void BM_predict_scores(benchmark::State& state) {
  const auto data = make_data(2000, 200);
  iwtl::Hyperparams hp;
  hp.boosting_rounds = 200;
  const iwtl::Model m = iwtl::train_plain(data.source, hp);
  for (auto _ : state) {
    const Eigen::VectorXd s = iwtl::predict_scores(m, data.source.x);
    benchmark::DoNotOptimize(s.sum());
  }
  state.SetItemsProcessed(state.iterations() * data.source.n());
}
BENCHMARK(BM_predict_scores)->Unit(benchmark::kMillisecond);

}  // namespace
