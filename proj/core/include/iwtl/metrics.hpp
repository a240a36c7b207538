#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "iwtl/dataset.hpp"

namespace iwtl {

struct Model;  // learner.hpp

// 2x2 confusion counts; "positive" is class 1 (the rare class).
struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
};

// Headline numbers for one model on one test set. Precision/recall refer to
// the positive class; macro-F1 averages both per-class F1 scores. Any term
// with a zero denominator is defined as 0.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  Confusion confusion;

  static Metrics from_confusion(const Confusion& c);
};

Confusion count_confusion(const Eigen::VectorXi& truth,
                          const Eigen::VectorXi& predicted);

// Convenience: confusion + derived metrics in one pass.
Metrics compute_metrics(const Eigen::VectorXi& truth,
                        const Eigen::VectorXi& predicted);

// Evaluate a trained model on a (nonempty) test set.
Metrics evaluate(const Model& model, const Dataset& test);

}  // namespace iwtl
