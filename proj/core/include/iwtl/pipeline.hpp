#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "iwtl/dataset.hpp"
#include "iwtl/learner.hpp"
#include "iwtl/metrics.hpp"

namespace iwtl {

// The six methods under comparison. TargetOnly/SourceOnly/Union are plain
// fits; AllOnes/Gaussian/Hybrid are Eq.-3 blends differing only in the source
// weight vector.
enum class BaselineKind {
  TargetOnly,
  SourceOnly,
  Union,
  AllOnes,
  Gaussian,
  Hybrid,
};

const char* baseline_name(BaselineKind kind);
BaselineKind baseline_from_name(const std::string& name);

enum class NegativePolicy { ClampZero, Allow };
enum class CombineScale { RawSum, StandardizedSum };

struct HybridConfig {
  double clip_max = 10.0;
  NegativePolicy negative_policy = NegativePolicy::ClampZero;
  CombineScale combine_scale = CombineScale::RawSum;
};

// Knobs for the weight submodules feeding the blends.
struct PipelineConfig {
  Hyperparams hp;
  HybridConfig hybrid;
  double discriminator_l2 = 1.0;
  bool discriminator_balance = true;
  double gaussian_ridge = 1e-3;
};

// Elementwise w_domain + w_task, then the negative policy, then the clip to
// [0, clip_max]. StandardizedSum first divides each vector by its own mean so
// both enter the sum at mean 1; a vector whose mean is not positive is left
// unscaled (a negative rescale would invert the ranking it encodes).
WeightVector hybrid_weights(const Eigen::VectorXd& domain_w,
                            const Eigen::VectorXd& task_w,
                            const HybridConfig& cfg);

// hybrid_weights plus the bookkeeping the evaluation report carries.
struct HybridWeightDetail {
  WeightVector final;
  Eigen::VectorXd domain;  // raw discriminator weights
  Eigen::VectorXd task;    // raw signed margins
  double fraction_clamped = 0.0;  // entries whose combined sum fell below 0
  double fraction_clipped = 0.0;  // entries cut at clip_max
  Eigen::Index domain_saturated = 0;
};
HybridWeightDetail build_hybrid_weights(const Dataset& source,
                                        const Dataset& target,
                                        const PipelineConfig& cfg);

// Source weight vector a given baseline kind trains with (all-ones for the
// unweighted kinds so the Eq.-3 identities stay exact).
WeightVector weights_for_baseline(BaselineKind kind, const Dataset& source,
                                  const Dataset& target,
                                  const PipelineConfig& cfg);

// One trained model per method. `alpha` applies to the blended kinds and is
// ignored by TargetOnly (alpha = 1), SourceOnly (alpha = 0), and Union
// (alpha = N_T/(N_T+N_S)).
Model build_baseline(BaselineKind kind, const Dataset& source,
                     const Dataset& target, double alpha,
                     const PipelineConfig& cfg);

// Cross-validated alpha selection on the target training set: k stratified
// folds, train on fold-train ∪ weighted source, score macro-F1 on the fold
// holdout. Ties prefer the larger alpha. The fold scores are returned so the
// choice is recomputable.
struct AlphaSelection {
  double alpha = 1.0;
  std::vector<double> grid;
  std::vector<double> mean_scores;                 // per grid point
  std::vector<std::vector<double>> fold_scores;    // [grid][fold]
};
AlphaSelection select_alpha(const Dataset& source, const Dataset& target_train,
                            const WeightVector& w,
                            const std::vector<double>& grid, int folds,
                            const Hyperparams& hp, std::uint64_t fold_seed);

// Hybrid-weighted test-set curve over the alpha grid; weights are computed
// once (they do not depend on alpha) and reused across grid points.
struct SweepPoint {
  double alpha = 0.0;
  Metrics metrics;
};
std::vector<SweepPoint> alpha_sweep(const Dataset& source,
                                    const Dataset& target_train,
                                    const Dataset& target_test,
                                    const std::vector<double>& grid,
                                    const PipelineConfig& cfg);

}  // namespace iwtl
