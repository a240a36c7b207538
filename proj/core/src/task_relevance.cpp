#include "iwtl/task_relevance.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "iwtl/rng.hpp"

namespace iwtl {

Model fit_union_model(const Dataset& source, const Dataset& target,
                      const Hyperparams& hp) {
  if (source.empty() || target.empty())
    throw Error("union model: both datasets must be nonempty");
  const double n_t = static_cast<double>(target.n());
  const double n_s = static_cast<double>(source.n());
  return train_blend(target, source, WeightVector::ones(source.n()),
                     n_t / (n_t + n_s), hp);
}

double task_weight(const Model& model, const Eigen::VectorXd& x, int y) {
  if (y != 0 && y != 1) throw Error("task_weight: label must be 0 or 1");
  const double m = decision_margin(model, x);
  const int predicted = predict_label(model, x);
  return predicted == y ? std::abs(m) : -std::abs(m);
}

TaskWeightReport task_weights_for_source(const Model& model,
                                         const Dataset& source) {
  source.validate();
  TaskWeightReport report;
  report.weights.resize(source.n());
  report.predicted.resize(source.n());
  report.correct.resize(source.n());
  Eigen::Index negative = 0;
  for (Eigen::Index j = 0; j < source.n(); ++j) {
    const Eigen::VectorXd x = source.x.row(j).transpose();
    report.weights[j] = task_weight(model, x, source.y[j]);
    report.predicted[j] = predict_label(model, x);
    report.correct[j] = report.predicted[j] == source.y[j];
    negative += report.weights[j] < 0.0;
  }
  report.fraction_negative =
      source.n() == 0 ? 0.0
                      : static_cast<double>(negative) /
                            static_cast<double>(source.n());
  const std::string doc = model_to_json(model);
  report.union_model_id = fnv1a(doc);
  return report;
}

void write_task_weight_csv(const std::filesystem::path& path,
                           const TaskWeightReport& report) {
  if (report.predicted.size() != report.weights.size() ||
      report.correct.size() != report.weights.size())
    throw Error("task weight csv: report columns have mismatched lengths");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "w_task,predicted,correct\n";
  char buf[40];
  for (Eigen::Index j = 0; j < report.weights.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", report.weights[j]);
    out << buf << ',' << report.predicted[j] << ',' << report.correct[j]
        << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace iwtl
