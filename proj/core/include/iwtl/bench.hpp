#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iwtl/metrics.hpp"
#include "iwtl/pipeline.hpp"
#include "iwtl/synth.hpp"

namespace iwtl {

// Full description of one benchmark run. Serializable so a stored manifest
// can reproduce the run bit-exactly.
struct BenchConfig {
  ShiftScenario scenario;
  std::vector<BaselineKind> baselines;  // evaluated in this order
  std::vector<double> alpha_grid;       // CV candidates and sweep grid
  int cv_folds = 5;
  std::vector<std::uint64_t> seeds;     // one full run per entry
  bool invert_source_labels = false;    // adversarial-source probe
  bool include_sweep = true;            // per-seed hybrid alpha sweep
  int jobs = 1;                         // seed-level worker threads
  PipelineConfig pipeline;

  // All six baselines, grid {0.0, 0.1, ..., 1.0}, seeds 1..20.
  static BenchConfig defaults();

  void validate() const;
};

std::string bench_config_to_json(const BenchConfig& config);
BenchConfig bench_config_from_json(const std::string& text);

// Distribution of the source weight vector a baseline trained with.
// fraction_clipped/clamped count entries sitting at the clip ceiling / at
// zero after the negative-policy clamp.
struct WeightSummary {
  double min = 1.0;
  double mean = 1.0;
  double max = 1.0;
  double fraction_clipped = 0.0;
  double fraction_clamped = 0.0;
};

struct BaselineResult {
  BaselineKind kind = BaselineKind::TargetOnly;
  bool failed = false;
  std::string error;           // set when failed
  double alpha = 1.0;
  bool alpha_from_cv = false;  // true when alpha came from select_alpha
  Metrics metrics;
  WeightSummary weights;
  std::vector<int> predictions;  // test-set labels, row order
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<int> truth;  // test-set labels, row order
  std::vector<BaselineResult> baselines;
  std::vector<SweepPoint> sweep;  // empty when sweeps are disabled
};

struct MetricAggregate {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation across seeds
};

struct BaselineAggregate {
  BaselineKind kind = BaselineKind::TargetOnly;
  int n_seeds = 0;  // seeds where this baseline succeeded
  MetricAggregate precision, recall, macro_f1, accuracy;
};

// Paired one-sided sign test on per-seed macro-F1: Hybrid vs another
// baseline, over seeds where both succeeded. Ties carry no evidence and are
// excluded from the binomial.
struct OrderingTest {
  BaselineKind versus = BaselineKind::TargetOnly;
  int wins = 0;    // hybrid strictly better
  int losses = 0;  // hybrid strictly worse
  int ties = 0;
  double p_value = 1.0;
};

struct EvalReport {
  BenchConfig config;  // resolved configuration the run actually used
  std::vector<SeedResult> seeds;
  std::vector<BaselineAggregate> aggregates;
  std::vector<OrderingTest> ordering;   // present when Hybrid was run
  std::vector<SweepPoint> mean_sweep;   // per-alpha mean over seeds
};

// One-sided sign test: probability of >= wins successes in wins + losses
// fair-coin trials.
double sign_test_p(int wins, int losses);

// Runs every (seed x baseline) cell, then aggregates. Per-baseline failures
// are recorded on the affected row; the run itself continues. With jobs > 1
// seeds are processed by a thread pool; output is bit-identical to jobs = 1.
EvalReport run_benchmark(const BenchConfig& config);

std::string report_to_json(const EvalReport& report);

// CSV rows "alpha,precision,recall,macro_f1,accuracy" for external plotting.
std::string sweep_to_csv(const std::vector<SweepPoint>& curve);

}  // namespace iwtl
