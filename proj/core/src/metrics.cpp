#include "iwtl/metrics.hpp"

#include "iwtl/learner.hpp"

namespace iwtl {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_from(double prec, double rec) {
  return safe_div(2.0 * prec * rec, prec + rec);
}

}  // namespace

Metrics Metrics::from_confusion(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  const auto tn = static_cast<double>(c.tn);

  m.precision = safe_div(tp, tp + fp);
  m.recall = safe_div(tp, tp + fn);
  const double f1_pos = f1_from(m.precision, m.recall);

  const double prec_neg = safe_div(tn, tn + fn);
  const double rec_neg = safe_div(tn, tn + fp);
  const double f1_neg = f1_from(prec_neg, rec_neg);

  m.macro_f1 = 0.5 * (f1_pos + f1_neg);
  m.accuracy = safe_div(tp + tn, static_cast<double>(c.total()));
  return m;
}

Confusion count_confusion(const Eigen::VectorXi& truth,
                          const Eigen::VectorXi& predicted) {
  if (truth.size() != predicted.size())
    throw Error("confusion: size mismatch");
  Confusion c;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == 1;
    const bool p = predicted[i] == 1;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t && !p) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics compute_metrics(const Eigen::VectorXi& truth,
                        const Eigen::VectorXi& predicted) {
  return Metrics::from_confusion(count_confusion(truth, predicted));
}

Metrics evaluate(const Model& model, const Dataset& test) {
  if (test.empty()) throw Error("evaluate: empty test set");
  return compute_metrics(test.y, predict_labels(model, test.x));
}

}  // namespace iwtl
