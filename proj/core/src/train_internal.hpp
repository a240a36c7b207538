#pragma once

#include <Eigen/Core>

#include "iwtl/learner.hpp"

namespace iwtl::detail {

// Canonicalized weighted training problem shared by both trainers: rows with
// zero coefficient removed, remaining rows sorted lexicographically by
// (features, label, coefficient), coefficients normalized to total mass 1.
struct TrainProblem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;  // 0/1 as double
  Eigen::VectorXd c;  // positive, sums to 1
};

TrainProblem assemble_problem(const Dataset& target, const Dataset& source,
                              const WeightVector& w, const BlendSpec& spec);

// When loss_trace is non-null it receives the objective value at the starting
// point followed by the value after each accepted descent step.
Model fit_logreg(const TrainProblem& p, const Hyperparams& hp,
                 std::vector<double>* loss_trace = nullptr);
Model fit_stumps(const TrainProblem& p, const Hyperparams& hp);

// Numerically stable pieces shared by trainers and the objective.
double sigmoid(double z);
double log_loss(double score, double y01);  // softplus(score) - y*score

}  // namespace iwtl::detail
