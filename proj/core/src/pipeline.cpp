#include "iwtl/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "iwtl/density_ratio.hpp"
#include "iwtl/rng.hpp"
#include "iwtl/task_relevance.hpp"

namespace iwtl {

const char* baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::TargetOnly: return "target_only";
    case BaselineKind::SourceOnly: return "source_only";
    case BaselineKind::Union: return "union";
    case BaselineKind::AllOnes: return "all_ones";
    case BaselineKind::Gaussian: return "gaussian";
    case BaselineKind::Hybrid: return "hybrid";
  }
  throw Error("unknown baseline kind");
}

BaselineKind baseline_from_name(const std::string& name) {
  if (name == "target_only") return BaselineKind::TargetOnly;
  if (name == "source_only") return BaselineKind::SourceOnly;
  if (name == "union") return BaselineKind::Union;
  if (name == "all_ones") return BaselineKind::AllOnes;
  if (name == "gaussian") return BaselineKind::Gaussian;
  if (name == "hybrid") return BaselineKind::Hybrid;
  throw Error("unknown baseline name: " + name);
}

WeightVector hybrid_weights(const Eigen::VectorXd& domain_w,
                            const Eigen::VectorXd& task_w,
                            const HybridConfig& cfg) {
  if (domain_w.size() != task_w.size())
    throw Error("hybrid_weights: length mismatch");
  if (!domain_w.allFinite() || !task_w.allFinite())
    throw Error("hybrid_weights: non-finite entries");
  for (Eigen::Index i = 0; i < domain_w.size(); ++i)
    if (!(domain_w[i] > 0.0))
      throw Error("hybrid_weights: domain weights must be positive");

  Eigen::VectorXd dom = domain_w;
  Eigen::VectorXd task = task_w;
  if (cfg.combine_scale == CombineScale::StandardizedSum) {
    const double dm = dom.mean();
    if (dm > 1e-12) dom /= dm;
    const double tm = task.mean();
    if (tm > 1e-12) task /= tm;
  }

  WeightVector out;
  out.provenance = WeightProvenance::Hybrid;
  out.values = dom + task;
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    double v = out.values[i];
    if (cfg.negative_policy == NegativePolicy::ClampZero) v = std::max(v, 0.0);
    out.values[i] = std::min(v, cfg.clip_max);
  }
  return out;
}

HybridWeightDetail build_hybrid_weights(const Dataset& source,
                                        const Dataset& target,
                                        const PipelineConfig& cfg) {
  HybridWeightDetail detail;

  const LinearDiscriminator disc = fit_domain_discriminator(
      source, target, cfg.discriminator_l2, cfg.discriminator_balance);
  WeightBatch dom = domain_weights(disc, source.x);
  detail.domain = std::move(dom.values);
  detail.domain_saturated = dom.saturated_count;

  const Model union_model = fit_union_model(source, target, cfg.hp);
  detail.task = task_weights_for_source(union_model, source).weights;

  detail.final = hybrid_weights(detail.domain, detail.task, cfg.hybrid);

  // Recount the policy effects on the same pre-policy sums the combiner saw.
  Eigen::VectorXd dom_scaled = detail.domain;
  Eigen::VectorXd task_scaled = detail.task;
  if (cfg.hybrid.combine_scale == CombineScale::StandardizedSum) {
    const double dm = dom_scaled.mean();
    if (dm > 1e-12) dom_scaled /= dm;
    const double tm = task_scaled.mean();
    if (tm > 1e-12) task_scaled /= tm;
  }
  const Eigen::VectorXd sum = dom_scaled + task_scaled;
  const auto n = static_cast<double>(sum.size());
  if (n > 0) {
    detail.fraction_clamped =
        static_cast<double>((sum.array() < 0.0).count()) / n;
    detail.fraction_clipped =
        static_cast<double>((sum.array() > cfg.hybrid.clip_max).count()) / n;
  }
  return detail;
}

WeightVector weights_for_baseline(BaselineKind kind, const Dataset& source,
                                  const Dataset& target,
                                  const PipelineConfig& cfg) {
  switch (kind) {
    case BaselineKind::TargetOnly:
    case BaselineKind::SourceOnly:
    case BaselineKind::Union:
    case BaselineKind::AllOnes:
      return WeightVector::ones(source.n());
    case BaselineKind::Gaussian: {
      const GaussianDomainModel g =
          fit_gaussian_model(source, target, cfg.gaussian_ridge);
      WeightVector w;
      w.provenance = WeightProvenance::Gaussian;
      w.values = gaussian_weights(g, source.x).values;
      for (Eigen::Index i = 0; i < w.values.size(); ++i)
        w.values[i] = std::min(std::max(w.values[i], 0.0), cfg.hybrid.clip_max);
      return w;
    }
    case BaselineKind::Hybrid:
      return build_hybrid_weights(source, target, cfg).final;
  }
  throw Error("unknown baseline kind");
}

Model build_baseline(BaselineKind kind, const Dataset& source,
                     const Dataset& target, double alpha,
                     const PipelineConfig& cfg) {
  const WeightVector w = weights_for_baseline(kind, source, target, cfg);
  switch (kind) {
    case BaselineKind::TargetOnly:
      return train_blend(target, source, w, 1.0, cfg.hp);
    case BaselineKind::SourceOnly:
      return train_blend(target, source, w, 0.0, cfg.hp);
    case BaselineKind::Union: {
      const double n_t = static_cast<double>(target.n());
      const double n_s = static_cast<double>(source.n());
      return train_blend(target, source, w, n_t / (n_t + n_s), cfg.hp);
    }
    case BaselineKind::AllOnes:
    case BaselineKind::Gaussian:
    case BaselineKind::Hybrid:
      return train_blend(target, source, w, alpha, cfg.hp);
  }
  throw Error("unknown baseline kind");
}

AlphaSelection select_alpha(const Dataset& source, const Dataset& target_train,
                            const WeightVector& w,
                            const std::vector<double>& grid, int folds,
                            const Hyperparams& hp, std::uint64_t fold_seed) {
  if (grid.empty()) throw Error("select_alpha: empty grid");
  for (double a : grid)
    if (!(a >= 0.0 && a <= 1.0)) throw Error("select_alpha: alpha outside [0, 1]");

  // Stratified k-fold CV, falling back to leave-one-out when the rarer class
  // has too few samples to appear in every fold. An absent class is still an
  // error (stratified_folds reports it).
  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < target_train.y.size(); ++i)
    n_pos += (target_train.y[i] == 1);
  const Eigen::Index min_class = std::min(n_pos, target_train.n() - n_pos);

  std::vector<std::vector<Eigen::Index>> fold_idx;
  if (min_class >= static_cast<Eigen::Index>(folds) || min_class == 0) {
    Rng rng = Rng::derive(fold_seed, "cv_folds");
    fold_idx = stratified_folds(target_train.y, folds, rng);
  } else {
    fold_idx.resize(static_cast<std::size_t>(target_train.n()));
    for (Eigen::Index i = 0; i < target_train.n(); ++i)
      fold_idx[static_cast<std::size_t>(i)] = {i};
  }

  AlphaSelection sel;
  sel.grid = grid;
  sel.fold_scores.assign(grid.size(), std::vector<double>());

  // Materialize fold train/holdout datasets once; grid points reuse them.
  for (const auto& holdout : fold_idx) {
    std::vector<char> in_holdout(static_cast<std::size_t>(target_train.n()), 0);
    for (Eigen::Index i : holdout) in_holdout[static_cast<std::size_t>(i)] = 1;

    Dataset fold_train, fold_val;
    const Eigen::Index n = target_train.n();
    const auto n_hold = static_cast<Eigen::Index>(holdout.size());
    fold_train.x.resize(n - n_hold, target_train.dim());
    fold_train.y.resize(n - n_hold);
    fold_val.x.resize(n_hold, target_train.dim());
    fold_val.y.resize(n_hold);
    Eigen::Index a = 0, b = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in_holdout[static_cast<std::size_t>(i)]) {
        fold_val.x.row(b) = target_train.x.row(i);
        fold_val.y[b++] = target_train.y[i];
      } else {
        fold_train.x.row(a) = target_train.x.row(i);
        fold_train.y[a++] = target_train.y[i];
      }
    }

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const Model m = train_blend(fold_train, source, w, grid[gi], hp);
      sel.fold_scores[gi].push_back(evaluate(m, fold_val).macro_f1);
    }
  }

  sel.mean_scores.resize(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    double s = 0.0;
    for (double v : sel.fold_scores[gi]) s += v;
    sel.mean_scores[gi] = s / static_cast<double>(sel.fold_scores[gi].size());
  }

  // Argmax with ties resolved toward the larger alpha.
  std::size_t best = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    const bool better = sel.mean_scores[gi] > sel.mean_scores[best];
    const bool tie_larger = sel.mean_scores[gi] == sel.mean_scores[best] &&
                            grid[gi] > grid[best];
    if (better || tie_larger) best = gi;
  }
  sel.alpha = grid[best];
  return sel;
}

std::vector<SweepPoint> alpha_sweep(const Dataset& source,
                                    const Dataset& target_train,
                                    const Dataset& target_test,
                                    const std::vector<double>& grid,
                                    const PipelineConfig& cfg) {
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw Error("alpha_sweep: grid must be sorted ascending");
  const WeightVector w =
      build_hybrid_weights(source, target_train, cfg).final;

  std::vector<SweepPoint> curve;
  curve.reserve(grid.size());
  for (double alpha : grid) {
    const Model m = train_blend(target_train, source, w, alpha, cfg.hp);
    curve.push_back(SweepPoint{alpha, evaluate(m, target_test)});
  }
  return curve;
}

}  // namespace iwtl
