#include <cmath>

#include "train_internal.hpp"

namespace iwtl::detail {

namespace {

struct Objective {
  const TrainProblem& p;
  double l2;

  // Loss, probabilities and gradient at (w, b). Returns objective value.
  double eval(const Eigen::VectorXd& w, double b, Eigen::VectorXd* grad_w,
              double* grad_b) const {
    const Eigen::VectorXd z = (p.x * w).array() + b;
    double loss = 0.0;
    Eigen::VectorXd r(z.size());  // c * (sigmoid(z) - y)
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      loss += p.c[i] * log_loss(z[i], p.y[i]);
      r[i] = p.c[i] * (sigmoid(z[i]) - p.y[i]);
    }
    loss += 0.5 * l2 * w.squaredNorm();
    if (grad_w) *grad_w = p.x.transpose() * r + l2 * w;
    if (grad_b) *grad_b = r.sum();
    return loss;
  }
};

}  // namespace

Model fit_logreg(const TrainProblem& p, const Hyperparams& hp,
                 std::vector<double>* loss_trace) {
  if (!(hp.l2_reg > 0.0))
    throw Error("logistic training requires l2_reg > 0");

  const Eigen::Index d = p.x.cols();
  const Objective obj{p, hp.l2_reg};

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  Eigen::VectorXd gw(d);
  double gb = 0.0;
  double f = obj.eval(w, b, &gw, &gb);
  if (loss_trace) loss_trace->push_back(f);

  // Gradient descent with a Barzilai-Borwein step estimate refined by Armijo
  // backtracking: deterministic, no tuning, fast on this well-conditioned
  // convex objective.
  Eigen::VectorXd prev_gw;
  double prev_gb = 0.0;
  Eigen::VectorXd prev_w;
  double prev_b = 0.0;
  double step = 1.0;
  bool converged = false;
  int iter = 0;

  for (; iter < hp.max_iterations; ++iter) {
    const double gnorm =
        std::sqrt(gw.squaredNorm() + gb * gb);
    if (gnorm <= hp.grad_tolerance) {
      converged = true;
      break;
    }

    if (iter > 0) {
      const Eigen::VectorXd sw = w - prev_w;
      const double sb = b - prev_b;
      const Eigen::VectorXd yw = gw - prev_gw;
      const double yb = gb - prev_gb;
      const double sy = sw.dot(yw) + sb * yb;
      const double ss = sw.squaredNorm() + sb * sb;
      if (sy > 0.0 && ss > 0.0) step = ss / sy;
    }
    step = std::min(std::max(step, 1e-12), 1e12);

    prev_w = w;
    prev_b = b;
    prev_gw = gw;
    prev_gb = gb;

    const double g2 = gw.squaredNorm() + gb * gb;
    double t = step;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      const Eigen::VectorXd wt = w - t * gw;
      const double bt = b - t * gb;
      const double ft = obj.eval(wt, bt, nullptr, nullptr);
      if (ft <= f - 1e-4 * t * g2) {
        w = wt;
        b = bt;
        f = obj.eval(w, b, &gw, &gb);
        if (loss_trace) loss_trace->push_back(f);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // step underflow: no further progress possible
    step = t;
  }

  Model m;
  m.kind = LearnerKind::LogReg;
  m.w = w;
  m.intercept = b;
  m.final_objective = f;
  m.converged = converged ||
                std::sqrt(gw.squaredNorm() + gb * gb) <= hp.grad_tolerance;
  return m;
}

}  // namespace iwtl::detail
