#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "iwtl/dataset.hpp"

namespace iwtl {

enum class LearnerKind { LogReg, BoostedStumps };

enum class WeightProvenance { Ones, Gaussian, Hybrid, Custom };

// Per-source-sample importance weights entering the blended objective.
struct WeightVector {
  Eigen::VectorXd values;
  WeightProvenance provenance = WeightProvenance::Custom;

  static WeightVector ones(Eigen::Index n);

  // Throws unless every entry is finite and inside [0, clip_max].
  void validate(double clip_max) const;
};

struct Hyperparams {
  LearnerKind learner = LearnerKind::BoostedStumps;

  // Logistic regression (full-batch gradient descent).
  double l2_reg = 1e-2;          // applies to feature weights, not intercept
  double grad_tolerance = 1e-8;  // L2 norm of the full gradient
  int max_iterations = 10000;

  // Boosted stumps.
  int boosting_rounds = 200;
  double learning_rate = 0.1;
  double min_child_hessian = 1e-6;
};

struct Stump {
  int feature = 0;
  double threshold = 0.0;  // midpoint of adjacent observed values
  double left = 0.0;       // applied when x[feature] < threshold
  double right = 0.0;
};

// A trained predictor of either family. Scores are log-odds-like: the label
// rule is score > 0 -> 1 (ties -> 0).
struct Model {
  LearnerKind kind = LearnerKind::LogReg;

  // LogReg parameters.
  Eigen::VectorXd w;
  double intercept = 0.0;

  // BoostedStumps parameters.
  std::vector<Stump> stumps;
  double base_score = 0.0;

  // Training metadata.
  Hyperparams hp;
  std::uint64_t seed = 0;
  double final_objective = 0.0;
  bool converged = true;

  Eigen::Index dim() const;
};

// --- Blended-objective training (Eq.-3-style coefficients) ------------------
//
// Every trainer reduces to one weighted fit over stacked rows with per-sample
// coefficients: target rows carry alpha/N_T, source rows carry
// (1-alpha)*w_j/N_S. Rows with zero coefficient are dropped, the remainder is
// put into a canonical order (lexicographic by feature row, then label, then
// coefficient) so results are invariant to input permutation, and
// coefficients are normalized to total mass 1 before optimization (the L2
// penalty and hessian floor therefore see a scale-free objective; the argmin
// of the pure loss part is unchanged).

Model train_blend(const Dataset& target, const Dataset& source,
                  const WeightVector& w, double alpha, const Hyperparams& hp);

// Kind-forcing convenience wrappers over train_blend.
Model train_weighted_logreg(const Dataset& target, const Dataset& source,
                            const WeightVector& w, double alpha,
                            const Hyperparams& hp);
Model train_weighted_boosted_stumps(const Dataset& target,
                                    const Dataset& source,
                                    const WeightVector& w, double alpha,
                                    const Hyperparams& hp);

// Explicit term scales, exposed so the coefficient algebra is testable:
// train_blend(alpha) is exactly BlendSpec{alpha, 1 - alpha}. The trained
// model depends on (spec.source_scale, w) only through the products
// spec.source_scale * w_j.
struct BlendSpec {
  double target_scale = 1.0;
  double source_scale = 0.0;
};
Model train_blend_spec(const Dataset& target, const Dataset& source,
                       const WeightVector& w, const BlendSpec& spec,
                       const Hyperparams& hp);

// Unweighted single-dataset fit (coefficients 1/N each).
Model train_plain(const Dataset& data, const Hyperparams& hp);

// --- Objective -------------------------------------------------------------

// Raw blended log loss, exactly (alpha/N_T) sum target losses +
// ((1-alpha)/N_S) sum w_j * source losses, plus the L2 penalty reported
// separately (zero for stumps).
struct ObjectiveValue {
  double blended_loss = 0.0;
  double l2_penalty = 0.0;
};
ObjectiveValue weighted_objective(const Model& model, const Dataset& target,
                                  const Dataset& source,
                                  const WeightVector& w, double alpha);

// --- Prediction ------------------------------------------------------------

double predict_score(const Model& model, const Eigen::VectorXd& x);
int predict_label(const Model& model, const Eigen::VectorXd& x);

// Signed distance-like score from the decision boundary: geometric margin
// (x.w + c)/|w| for LogReg (0 when |w| = 0), raw additive score for stumps.
double decision_margin(const Model& model, const Eigen::VectorXd& x);

Eigen::VectorXd predict_scores(const Model& model, const Eigen::MatrixXd& x);
Eigen::VectorXi predict_labels(const Model& model, const Eigen::MatrixXd& x);
Eigen::VectorXd decision_margins(const Model& model, const Eigen::MatrixXd& x);

// --- Serialization ----------------------------------------------------------

// Versioned JSON document; reload gives bit-identical predictions.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

}  // namespace iwtl
