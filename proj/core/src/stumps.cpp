#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "train_internal.hpp"

namespace iwtl::detail {

namespace {

// Indices of one feature column in ascending value order (ties by row index,
// which is already canonical).
std::vector<Eigen::Index> sort_feature(const Eigen::MatrixXd& x,
                                       Eigen::Index j) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double av = x(a, j), bv = x(b, j);
    if (av != bv) return av < bv;
    return a < b;
  });
  return order;
}

struct SplitChoice {
  bool found = false;
  double gain = 0.0;
  int feature = 0;
  double threshold = 0.0;
  double g_left = 0.0;
  double h_left = 0.0;
};

}  // namespace

Model fit_stumps(const TrainProblem& p, const Hyperparams& hp) {
  if (hp.boosting_rounds < 1) throw Error("boosting_rounds must be >= 1");
  if (!(hp.learning_rate > 0.0)) throw Error("learning_rate must be > 0");

  const Eigen::Index n = p.x.rows();
  const Eigen::Index d = p.x.cols();

  std::vector<std::vector<Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) order.push_back(sort_feature(p.x, j));

  Model m;
  m.kind = LearnerKind::BoostedStumps;
  m.base_score = 0.0;

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g(n), h(n);

  for (int round = 0; round < hp.boosting_rounds; ++round) {
    double g_total = 0.0, h_total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double prob = sigmoid(f[i]);
      g[i] = p.c[i] * (prob - p.y[i]);
      h[i] = p.c[i] * prob * (1.0 - prob);
      g_total += g[i];
      h_total += h[i];
    }
    const double parent_score =
        h_total > 0.0 ? g_total * g_total / h_total : 0.0;

    // Scan features in ascending index and thresholds in ascending value;
    // strict improvement keeps the first (lowest) candidate on ties.
    SplitChoice best;
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto& ord = order[static_cast<std::size_t>(j)];
      double gl = 0.0, hl = 0.0;
      for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const Eigen::Index row = ord[static_cast<std::size_t>(k)];
        gl += g[row];
        hl += h[row];
        const double v = p.x(row, j);
        const double v_next = p.x(ord[static_cast<std::size_t>(k + 1)], j);
        if (v == v_next) continue;  // not a boundary between distinct values
        const double thr = 0.5 * (v + v_next);
        if (!(v < thr && thr <= v_next)) continue;  // midpoint degenerated
        const double gr = g_total - gl;
        const double hr = h_total - hl;
        if (hl < hp.min_child_hessian || hr < hp.min_child_hessian) continue;
        const double gain = gl * gl / hl + gr * gr / hr - parent_score;
        if (gain > best.gain) {
          best = SplitChoice{true, gain, static_cast<int>(j), thr, gl, hl};
        }
      }
    }
    if (!best.found) break;  // no split improves the quadratic approximation

    const double gr = g_total - best.g_left;
    const double hr = h_total - best.h_left;
    Stump s;
    s.feature = best.feature;
    s.threshold = best.threshold;
    s.left = -hp.learning_rate * best.g_left / best.h_left;
    s.right = -hp.learning_rate * gr / hr;
    m.stumps.push_back(s);

    for (Eigen::Index i = 0; i < n; ++i)
      f[i] += p.x(i, s.feature) < s.threshold ? s.left : s.right;
  }

  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) loss += p.c[i] * log_loss(f[i], p.y[i]);
  m.final_objective = loss;
  m.converged = true;
  return m;
}

}  // namespace iwtl::detail
