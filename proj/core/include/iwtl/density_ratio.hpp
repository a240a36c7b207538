#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <filesystem>

#include "iwtl/dataset.hpp"

namespace iwtl {

// Logistic source-vs-target classifier (label 1 = source). The domain weight
// of a source point is exp(-(x.w_lr + c_lr)), i.e. the model's odds of
// "target", which estimates the density ratio P_T(x)/P_S(x) when classes are
// balanced in the loss.
struct LinearDiscriminator {
  Eigen::VectorXd w_lr;
  double c_lr = 0.0;
  bool converged = false;
  double final_grad_norm = 0.0;  // full-gradient L2 norm at the returned point
};

// Fits the discriminator by L2-regularized logistic regression (deterministic
// zero-init gradient descent with backtracking, tolerance 1e-8, cap 5000).
// With balance set, each domain carries equal total loss mass regardless of
// size, keeping c_lr free of the log(N_T/N_S) prior offset.
LinearDiscriminator fit_domain_discriminator(const Dataset& source,
                                             const Dataset& target,
                                             double l2_reg,
                                             bool balance = true);

// Weight evaluations saturate at exp(700) instead of overflowing; batch
// results carry the number of saturated entries.
inline constexpr double kMaxLogWeight = 700.0;

struct WeightBatch {
  Eigen::VectorXd values;
  Eigen::Index saturated_count = 0;
};

double domain_weight(const LinearDiscriminator& disc, const Eigen::VectorXd& x);
WeightBatch domain_weights(const LinearDiscriminator& disc,
                           const Eigen::MatrixXd& x);

// Parametric alternative: one multivariate normal per domain, covariances
// ridge-regularized (population denominator n, then ridge_eps on the
// diagonal). Weight = N(x; mu_T, sigma_T) / N(x; mu_S, sigma_S).
class GaussianDomainModel {
 public:
  GaussianDomainModel(Eigen::VectorXd mu_t, Eigen::MatrixXd sigma_t,
                      Eigen::VectorXd mu_s, Eigen::MatrixXd sigma_s,
                      double ridge_eps);

  const Eigen::VectorXd& mu_t() const { return mu_t_; }
  const Eigen::VectorXd& mu_s() const { return mu_s_; }
  const Eigen::MatrixXd& sigma_t() const { return sigma_t_; }
  const Eigen::MatrixXd& sigma_s() const { return sigma_s_; }
  double ridge_eps() const { return ridge_eps_; }

  double log_density_target(const Eigen::VectorXd& x) const;
  double log_density_source(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd mu_t_, mu_s_;
  Eigen::MatrixXd sigma_t_, sigma_s_;
  Eigen::LLT<Eigen::MatrixXd> chol_t_, chol_s_;
  double log_norm_t_ = 0.0, log_norm_s_ = 0.0;  // -(d/2)log(2pi)-(1/2)logdet
  double ridge_eps_ = 0.0;
};

GaussianDomainModel fit_gaussian_model(const Dataset& source,
                                       const Dataset& target,
                                       double ridge_eps = 1e-3);

double gaussian_weight(const GaussianDomainModel& model,
                       const Eigen::VectorXd& x);
WeightBatch gaussian_weights(const GaussianDomainModel& model,
                             const Eigen::MatrixXd& x);

// Single-column CSV (header "weight"), row order preserved.
void write_weight_csv(const std::filesystem::path& path,
                      const Eigen::VectorXd& w);

}  // namespace iwtl
