#include "iwtl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "train_internal.hpp"

namespace iwtl {

WeightVector WeightVector::ones(Eigen::Index n) {
  return WeightVector{Eigen::VectorXd::Ones(n), WeightProvenance::Ones};
}

void WeightVector::validate(double clip_max) const {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) throw Error("weight vector has non-finite entry");
    if (v < 0.0 || v > clip_max)
      throw Error("weight vector entry outside [0, clip_max]");
  }
}

Eigen::Index Model::dim() const {
  if (kind == LearnerKind::LogReg) return w.size();
  int max_feature = -1;
  for (const auto& s : stumps) max_feature = std::max(max_feature, s.feature);
  return max_feature + 1;
}

namespace detail {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_loss(double score, double y01) {
  // softplus(score) - y*score, stable for large |score|.
  const double sp = std::max(score, 0.0) + std::log1p(std::exp(-std::abs(score)));
  return sp - y01 * score;
}

TrainProblem assemble_problem(const Dataset& target, const Dataset& source,
                              const WeightVector& w, const BlendSpec& spec) {
  target.validate();
  source.validate();
  if (w.values.size() != source.n())
    throw Error("weight vector length must equal source size");
  if (!target.empty() && !source.empty() && target.dim() != source.dim())
    throw Error("target/source dimension mismatch");

  const Eigen::Index n_t = target.n();
  const Eigen::Index n_s = source.n();
  const double ct = n_t > 0 ? spec.target_scale / static_cast<double>(n_t) : 0.0;

  // Gather retained (row, label, coefficient) triples.
  struct Row {
    const Dataset* src;
    Eigen::Index i;
    double c;
  };
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(n_t + n_s));
  if (ct != 0.0)
    for (Eigen::Index i = 0; i < n_t; ++i) rows.push_back({&target, i, ct});
  for (Eigen::Index j = 0; j < n_s; ++j) {
    const double cj = spec.source_scale * w.values[j] / static_cast<double>(n_s);
    if (!std::isfinite(cj)) throw Error("non-finite blend coefficient");
    if (cj < 0.0) throw Error("negative blend coefficient");
    if (cj != 0.0) rows.push_back({&source, j, cj});
  }
  if (rows.empty())
    throw Error("no samples with positive weight (all coefficients zero)");

  const Eigen::Index d = target.empty() ? source.dim() : target.dim();

  // Canonical order: lexicographic by feature row, then label, then
  // coefficient. Makes every downstream reduction independent of the order
  // samples arrived in.
  auto less = [&](const Row& a, const Row& b) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double av = a.src->x(a.i, j), bv = b.src->x(b.i, j);
      if (av != bv) return av < bv;
    }
    const int ay = a.src->y[a.i], by = b.src->y[b.i];
    if (ay != by) return ay < by;
    return a.c < b.c;
  };
  std::sort(rows.begin(), rows.end(), less);

  TrainProblem p;
  const auto n = static_cast<Eigen::Index>(rows.size());
  p.x.resize(n, d);
  p.y.resize(n);
  p.c.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    p.x.row(i) = r.src->x.row(r.i);
    p.y[i] = static_cast<double>(r.src->y[r.i]);
    p.c[i] = r.c;
  }

  double mass = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) mass += p.c[i];
  if (!(mass > 0.0)) throw Error("total sample mass is not positive");
  p.c /= mass;
  return p;
}

}  // namespace detail

Model train_blend_spec(const Dataset& target, const Dataset& source,
                       const WeightVector& w, const BlendSpec& spec,
                       const Hyperparams& hp) {
  const auto p = detail::assemble_problem(target, source, w, spec);
  Model m = hp.learner == LearnerKind::LogReg ? detail::fit_logreg(p, hp)
                                              : detail::fit_stumps(p, hp);
  m.hp = hp;
  return m;
}

Model train_blend(const Dataset& target, const Dataset& source,
                  const WeightVector& w, double alpha, const Hyperparams& hp) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must be in [0, 1]");
  return train_blend_spec(target, source, w, BlendSpec{alpha, 1.0 - alpha}, hp);
}

Model train_weighted_logreg(const Dataset& target, const Dataset& source,
                            const WeightVector& w, double alpha,
                            const Hyperparams& hp) {
  Hyperparams h = hp;
  h.learner = LearnerKind::LogReg;
  return train_blend(target, source, w, alpha, h);
}

Model train_weighted_boosted_stumps(const Dataset& target,
                                    const Dataset& source,
                                    const WeightVector& w, double alpha,
                                    const Hyperparams& hp) {
  Hyperparams h = hp;
  h.learner = LearnerKind::BoostedStumps;
  return train_blend(target, source, w, alpha, h);
}

Model train_plain(const Dataset& data, const Hyperparams& hp) {
  // An unweighted fit is the alpha = 1 endpoint with data as the "target".
  Dataset empty_source;
  empty_source.x.resize(0, data.dim());
  empty_source.y.resize(0);
  return train_blend(data, empty_source, WeightVector::ones(0), 1.0, hp);
}

ObjectiveValue weighted_objective(const Model& model, const Dataset& target,
                                  const Dataset& source,
                                  const WeightVector& w, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must be in [0, 1]");
  if (w.values.size() != source.n())
    throw Error("weight vector length must equal source size");

  double loss = 0.0;
  if (target.n() > 0 && alpha != 0.0) {
    const Eigen::VectorXd scores = predict_scores(model, target.x);
    double s = 0.0;
    for (Eigen::Index i = 0; i < target.n(); ++i)
      s += detail::log_loss(scores[i], static_cast<double>(target.y[i]));
    loss += alpha / static_cast<double>(target.n()) * s;
  }
  if (source.n() > 0 && alpha != 1.0) {
    const Eigen::VectorXd scores = predict_scores(model, source.x);
    double s = 0.0;
    for (Eigen::Index j = 0; j < source.n(); ++j)
      s += w.values[j] *
           detail::log_loss(scores[j], static_cast<double>(source.y[j]));
    loss += (1.0 - alpha) / static_cast<double>(source.n()) * s;
  }
  if (!std::isfinite(loss)) throw Error("non-finite blended objective");

  ObjectiveValue v;
  v.blended_loss = loss;
  if (model.kind == LearnerKind::LogReg)
    v.l2_penalty = 0.5 * model.hp.l2_reg * model.w.squaredNorm();
  return v;
}

double predict_score(const Model& model, const Eigen::VectorXd& x) {
  if (model.kind == LearnerKind::LogReg) {
    if (x.size() != model.w.size()) throw Error("predict: dimension mismatch");
    return model.w.dot(x) + model.intercept;
  }
  double f = model.base_score;
  for (const auto& s : model.stumps) {
    if (s.feature >= x.size()) throw Error("predict: dimension mismatch");
    f += x[s.feature] < s.threshold ? s.left : s.right;
  }
  return f;
}

int predict_label(const Model& model, const Eigen::VectorXd& x) {
  return predict_score(model, x) > 0.0 ? 1 : 0;
}

double decision_margin(const Model& model, const Eigen::VectorXd& x) {
  const double score = predict_score(model, x);
  if (model.kind == LearnerKind::BoostedStumps) return score;
  const double norm = model.w.norm();
  return norm == 0.0 ? 0.0 : score / norm;
}

Eigen::VectorXd predict_scores(const Model& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out[i] = predict_score(model, x.row(i).transpose());
  return out;
}

Eigen::VectorXi predict_labels(const Model& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out[i] = predict_score(model, x.row(i).transpose()) > 0.0 ? 1 : 0;
  return out;
}

Eigen::VectorXd decision_margins(const Model& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  if (model.kind == LearnerKind::BoostedStumps) {
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      out[i] = predict_score(model, x.row(i).transpose());
    return out;
  }
  const double norm = model.w.norm();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double s = predict_score(model, x.row(i).transpose());
    out[i] = norm == 0.0 ? 0.0 : s / norm;
  }
  return out;
}

}  // namespace iwtl
