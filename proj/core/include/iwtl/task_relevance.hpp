#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>

#include "iwtl/dataset.hpp"
#include "iwtl/learner.hpp"

namespace iwtl {

// Signed task-relevance weights for source samples, measured against the
// union model's decision boundary: |margin| rewarded when the union model
// agrees with the sample's label, -|margin| when it does not.
struct TaskWeightReport {
  Eigen::VectorXd weights;        // length N_S, signed
  Eigen::VectorXi predicted;      // union-model label per source sample
  Eigen::VectorXi correct;        // 1 when predicted matches the source label
  std::uint64_t union_model_id = 0;  // digest of the union model document
  double fraction_negative = 0.0;
};

// The pooled (source ∪ target) model: unweighted training, equivalently the
// Eq.-3 blend with all-ones weights at alpha = N_T/(N_T+N_S).
Model fit_union_model(const Dataset& source, const Dataset& target,
                      const Hyperparams& hp);

double task_weight(const Model& model, const Eigen::VectorXd& x, int y);

TaskWeightReport task_weights_for_source(const Model& model,
                                         const Dataset& source);

// Columns: w_task,predicted,correct — one row per source sample.
void write_task_weight_csv(const std::filesystem::path& path,
                           const TaskWeightReport& report);

}  // namespace iwtl
