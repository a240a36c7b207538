#include "iwtl/density_ratio.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "iwtl/learner.hpp"
#include "train_internal.hpp"

namespace iwtl {

namespace {

double saturated_exp(double log_w, bool* saturated) {
  if (log_w > kMaxLogWeight) {
    if (saturated) *saturated = true;
    return std::exp(kMaxLogWeight);
  }
  return std::exp(log_w);
}

Eigen::MatrixXd population_covariance(const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& mu,
                                      double ridge_eps) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / n;
  cov.diagonal().array() += ridge_eps;
  return cov;
}

}  // namespace

LinearDiscriminator fit_domain_discriminator(const Dataset& source,
                                             const Dataset& target,
                                             double l2_reg, bool balance) {
  if (source.empty() || target.empty())
    throw Error("discriminator: both datasets must be nonempty");
  if (source.dim() != target.dim())
    throw Error("discriminator: dimension mismatch");
  if (!(l2_reg > 0.0)) throw Error("discriminator: l2_reg must be > 0");

  // Relabel as a domain-classification problem and reuse the blended trainer:
  // target rows (label 0) scale by target_scale/N_T, source rows (label 1) by
  // source_scale/N_S, which is exactly per-class balancing when both scales
  // are 0.5 and plain pooling when they are the class priors.
  Dataset t = target;
  t.y.setZero();
  Dataset s = source;
  s.y.setOnes();

  const double n_t = static_cast<double>(target.n());
  const double n_s = static_cast<double>(source.n());
  BlendSpec spec;
  if (balance) {
    spec = BlendSpec{0.5, 0.5};
  } else {
    spec = BlendSpec{n_t / (n_t + n_s), n_s / (n_t + n_s)};
  }

  Hyperparams hp;
  hp.learner = LearnerKind::LogReg;
  hp.l2_reg = l2_reg;
  hp.grad_tolerance = 1e-8;
  hp.max_iterations = 5000;

  const Model m =
      train_blend_spec(t, s, WeightVector::ones(s.n()), spec, hp);

  // Gradient of the trained objective at the returned point, on the same
  // canonicalized problem the optimizer saw (L2 applies to w only).
  const detail::TrainProblem p =
      detail::assemble_problem(t, s, WeightVector::ones(s.n()), spec);
  Eigen::VectorXd r = p.x * m.w;
  r.array() += m.intercept;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    r[i] = p.c[i] * (detail::sigmoid(r[i]) - p.y[i]);
  const Eigen::VectorXd grad_w = p.x.transpose() * r + l2_reg * m.w;
  const double grad_c = r.sum();
  const double grad_norm =
      std::sqrt(grad_w.squaredNorm() + grad_c * grad_c);

  return LinearDiscriminator{m.w, m.intercept, m.converged, grad_norm};
}

double domain_weight(const LinearDiscriminator& disc,
                     const Eigen::VectorXd& x) {
  if (x.size() != disc.w_lr.size())
    throw Error("domain_weight: dimension mismatch");
  return saturated_exp(-(disc.w_lr.dot(x) + disc.c_lr), nullptr);
}

WeightBatch domain_weights(const LinearDiscriminator& disc,
                           const Eigen::MatrixXd& x) {
  if (x.cols() != disc.w_lr.size())
    throw Error("domain_weights: dimension mismatch");
  WeightBatch out;
  out.values.resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    bool sat = false;
    out.values[i] =
        saturated_exp(-(disc.w_lr.dot(x.row(i).transpose()) + disc.c_lr), &sat);
    out.saturated_count += sat;
  }
  return out;
}

GaussianDomainModel::GaussianDomainModel(Eigen::VectorXd mu_t,
                                         Eigen::MatrixXd sigma_t,
                                         Eigen::VectorXd mu_s,
                                         Eigen::MatrixXd sigma_s,
                                         double ridge_eps)
    : mu_t_(std::move(mu_t)),
      mu_s_(std::move(mu_s)),
      sigma_t_(std::move(sigma_t)),
      sigma_s_(std::move(sigma_s)),
      ridge_eps_(ridge_eps) {
  chol_t_.compute(sigma_t_);
  chol_s_.compute(sigma_s_);
  if (chol_t_.info() != Eigen::Success || chol_s_.info() != Eigen::Success)
    throw Error("gaussian model: covariance not positive definite");
  const double d = static_cast<double>(mu_t_.size());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  auto half_logdet = [](const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  };
  log_norm_t_ = -0.5 * d * log2pi - half_logdet(chol_t_);
  log_norm_s_ = -0.5 * d * log2pi - half_logdet(chol_s_);
}

double GaussianDomainModel::log_density_target(const Eigen::VectorXd& x) const {
  if (x.size() != mu_t_.size()) throw Error("gaussian: dimension mismatch");
  const Eigen::VectorXd z = chol_t_.matrixL().solve(x - mu_t_);
  return log_norm_t_ - 0.5 * z.squaredNorm();
}

double GaussianDomainModel::log_density_source(const Eigen::VectorXd& x) const {
  if (x.size() != mu_s_.size()) throw Error("gaussian: dimension mismatch");
  const Eigen::VectorXd z = chol_s_.matrixL().solve(x - mu_s_);
  return log_norm_s_ - 0.5 * z.squaredNorm();
}

GaussianDomainModel fit_gaussian_model(const Dataset& source,
                                       const Dataset& target,
                                       double ridge_eps) {
  if (source.empty() || target.empty())
    throw Error("gaussian model: both datasets must be nonempty");
  if (source.dim() != target.dim())
    throw Error("gaussian model: dimension mismatch");
  if (!(ridge_eps > 0.0)) throw Error("gaussian model: ridge_eps must be > 0");

  const Eigen::VectorXd mu_t =
      target.x.colwise().mean().transpose();
  const Eigen::VectorXd mu_s =
      source.x.colwise().mean().transpose();
  return GaussianDomainModel(
      mu_t, population_covariance(target.x, mu_t, ridge_eps), mu_s,
      population_covariance(source.x, mu_s, ridge_eps), ridge_eps);
}

double gaussian_weight(const GaussianDomainModel& model,
                       const Eigen::VectorXd& x) {
  return saturated_exp(
      model.log_density_target(x) - model.log_density_source(x), nullptr);
}

WeightBatch gaussian_weights(const GaussianDomainModel& model,
                             const Eigen::MatrixXd& x) {
  WeightBatch out;
  out.values.resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    bool sat = false;
    const Eigen::VectorXd xi = x.row(i).transpose();
    out.values[i] = saturated_exp(
        model.log_density_target(xi) - model.log_density_source(xi), &sat);
    out.saturated_count += sat;
  }
  return out;
}

void write_weight_csv(const std::filesystem::path& path,
                      const Eigen::VectorXd& w) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "weight\n";
  char buf[40];
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", w[i]);
    out << buf << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace iwtl
