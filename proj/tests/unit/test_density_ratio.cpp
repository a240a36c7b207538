#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "iwtl/density_ratio.hpp"
#include "iwtl/learner.hpp"
#include "train_internal.hpp"

using iwtl::Dataset;
using iwtl::Error;
using iwtl::GaussianDomainModel;
using iwtl::LinearDiscriminator;
using iwtl::Rng;

TEST_CASE("domain_weight: closed forms") {
  LinearDiscriminator disc;
  disc.w_lr = Eigen::VectorXd::Zero(3);
  disc.c_lr = 0.0;
  Eigen::VectorXd x(3);
  x << 1.0, -2.0, 0.5;
  CHECK(iwtl::domain_weight(disc, x) == 1.0);

  LinearDiscriminator one;
  one.w_lr.resize(1);
  one.w_lr << 1.0;
  one.c_lr = 0.0;
  Eigen::VectorXd zero(1), minus(1);
  zero << 0.0;
  minus << -1.0;
  CHECK(iwtl::domain_weight(one, zero) == 1.0);
  CHECK(iwtl::domain_weight(one, minus) == std::exp(1.0));

  Eigen::VectorXd wrong(2);
  wrong << 1.0, 2.0;
  CHECK_THROWS_AS(iwtl::domain_weight(one, wrong), Error);
}

TEST_CASE("domain_weight: log-linearity in x") {
  LinearDiscriminator disc;
  disc.w_lr.resize(3);
  disc.w_lr << 0.7, -1.3, 0.2;
  disc.c_lr = 0.4;
  Rng r(9);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x1(3), x2(3);
    for (int j = 0; j < 3; ++j) {
      x1[j] = 2.0 * r.next_normal();
      x2[j] = 2.0 * r.next_normal();
    }
    const Eigen::VectorXd mid = 0.5 * (x1 + x2);
    const double lhs = std::log(iwtl::domain_weight(disc, x1)) +
                       std::log(iwtl::domain_weight(disc, x2));
    const double rhs = 2.0 * std::log(iwtl::domain_weight(disc, mid));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("discriminator: identical distributions shrink to zero weights") {
  // 500+500 i.i.d. standard normal; lambda = 1.0; 95th percentile of |w|
  // over 20 seeds stays under 0.15.
  std::vector<double> norms;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset s = testutil::gaussian_cloud(seed, 500, 3, 0.0);
    const Dataset t = testutil::gaussian_cloud(seed + 1000, 500, 3, 0.0);
    const LinearDiscriminator disc =
        iwtl::fit_domain_discriminator(s, t, 1.0, true);
    norms.push_back(disc.w_lr.norm());
    // The optimizer may stop an ulp shy of the 1e-8 convergence bar on some
    // seeds; what matters here is that it got essentially all the way down.
    CHECK(disc.final_grad_norm <= 1e-6);
  }
  std::sort(norms.begin(), norms.end());
  CHECK(norms[18] < 0.15);  // 95th percentile of 20 values
}

TEST_CASE("discriminator: recovers the 1-D Bayes slope and intercept") {
  const Dataset source = testutil::gaussian_cloud(5, 5000, 1, 0.0);
  const Dataset target = testutil::gaussian_cloud(6, 5000, 1, 1.0);
  const LinearDiscriminator disc =
      iwtl::fit_domain_discriminator(source, target, 1e-4, true);
  // P(source|x) for N(0,1) vs N(1,1) is logistic with slope -1, icept 0.5.
  CHECK(std::abs(disc.w_lr[0] - (-1.0)) < 0.15);
  CHECK(std::abs(disc.c_lr - 0.5) < 0.15);

  // Fitted weights track the true density ratio exp(x - 0.5) within 20%.
  for (double x : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
    Eigen::VectorXd xv(1);
    xv << x;
    const double w = iwtl::domain_weight(disc, xv);
    const double truth = std::exp(x - 0.5);
    CHECK(std::abs(w - truth) / truth < 0.20);
  }

  // Exact Bayes parameters give the exact ratio.
  LinearDiscriminator bayes;
  bayes.w_lr.resize(1);
  bayes.w_lr << -1.0;
  bayes.c_lr = 0.5;
  for (double x : {0.0, 0.5, 2.0}) {
    Eigen::VectorXd xv(1);
    xv << x;
    CHECK(iwtl::domain_weight(bayes, xv) ==
          doctest::Approx(std::exp(x - 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("discriminator: held-out source weights average to about 1") {
  const Dataset source = testutil::gaussian_cloud(7, 5000, 1, 0.0);
  const Dataset target = testutil::gaussian_cloud(8, 5000, 1, 1.0);
  const LinearDiscriminator disc =
      iwtl::fit_domain_discriminator(source, target, 1e-4, true);
  const Dataset held_out = testutil::gaussian_cloud(99, 5000, 1, 0.0);
  const iwtl::WeightBatch batch = iwtl::domain_weights(disc, held_out.x);
  CHECK(batch.saturated_count == 0);
  const double mean = batch.values.mean();
  CHECK(std::abs(mean - 1.0) < 0.15);
}

TEST_CASE("discriminator: balance keeps the degenerate 1-vs-1000 fit sane") {
  const Dataset source = testutil::gaussian_cloud(11, 1000, 2, 0.0);
  Dataset target;
  target.x.resize(1, 2);
  target.x << 0.1, -0.2;
  target.y = Eigen::VectorXi::Zero(1);
  const LinearDiscriminator balanced =
      iwtl::fit_domain_discriminator(source, target, 1.0, true);
  CHECK(balanced.w_lr.allFinite());
  CHECK(std::abs(balanced.c_lr) < 2.0);
  // Without balancing the intercept absorbs roughly log(1000).
  const LinearDiscriminator skewed =
      iwtl::fit_domain_discriminator(source, target, 1.0, false);
  CHECK(skewed.c_lr > balanced.c_lr + 2.0);
}

TEST_CASE("discriminator: training loss trace is monotone") {
  const Dataset source = testutil::gaussian_cloud(12, 300, 2, 0.0);
  Dataset t = testutil::gaussian_cloud(13, 200, 2, 0.8);
  t.y.setZero();
  Dataset s = source;
  s.y.setOnes();
  const auto problem = iwtl::detail::assemble_problem(
      t, s, iwtl::WeightVector::ones(s.n()), iwtl::BlendSpec{0.5, 0.5});
  iwtl::Hyperparams hp;
  hp.learner = iwtl::LearnerKind::LogReg;
  hp.l2_reg = 0.1;
  std::vector<double> trace;
  iwtl::detail::fit_logreg(problem, hp, &trace);
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i)
    CHECK(trace[i] <= trace[i - 1]);
  CHECK(trace.back() < trace.front());
}

TEST_CASE("domain_weights: overflow saturates with a flag") {
  LinearDiscriminator disc;
  disc.w_lr.resize(1);
  disc.w_lr << -1000.0;
  disc.c_lr = 0.0;
  Eigen::MatrixXd x(2, 1);
  x << 1.0, -1.0;
  const iwtl::WeightBatch batch = iwtl::domain_weights(disc, x);
  CHECK(batch.saturated_count == 1);
  CHECK(batch.values[0] == std::exp(700.0));
  CHECK(std::isfinite(batch.values[0]));
}

TEST_CASE("gaussian model: degenerate covariance examples") {
  Dataset target;
  target.x.resize(1, 2);
  target.x << 0.3, -0.7;
  target.y = Eigen::VectorXi::Zero(1);
  Dataset source;
  source.x.resize(2, 2);
  source.x << 0.0, 0.0, 2.0, 0.0;
  source.y = Eigen::VectorXi::Zero(2);

  const double ridge = 1e-3;
  const GaussianDomainModel model =
      iwtl::fit_gaussian_model(source, target, ridge);
  // Single-point target: covariance is exactly ridge * I.
  CHECK(model.sigma_t() == Eigen::MatrixXd::Identity(2, 2) * ridge);
  CHECK(model.mu_t() == target.x.row(0).transpose());
  // Two-point source {0, 2} on feature 0: mean 1, population var 1 (+ridge).
  CHECK(model.mu_s()[0] == 1.0);
  CHECK(model.mu_s()[1] == 0.0);
  CHECK(model.sigma_s()(0, 0) == 1.0 + ridge);
  CHECK(model.sigma_s()(1, 1) == ridge);
  CHECK(model.sigma_s()(0, 1) == 0.0);
  CHECK(model.ridge_eps() == ridge);
}

TEST_CASE("gaussian model: recovers known 3-D parameters") {
  Rng r(14);
  const Eigen::Vector3d mu(0.5, -1.0, 2.0);
  Eigen::Matrix3d a;
  a << 1.0, 0.3, 0.0, 0.0, 0.8, 0.2, 0.0, 0.0, 1.2;
  const Eigen::Matrix3d cov = a * a.transpose();
  Dataset sample;
  sample.x.resize(5000, 3);
  sample.y = Eigen::VectorXi::Zero(5000);
  for (Eigen::Index i = 0; i < 5000; ++i) {
    Eigen::Vector3d z(r.next_normal(), r.next_normal(), r.next_normal());
    sample.x.row(i) = (mu + a * z).transpose();
  }
  const GaussianDomainModel model =
      iwtl::fit_gaussian_model(sample, sample, 1e-3);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(model.mu_s()[j] - mu[j]) < 0.05);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(model.sigma_s()(i, j) - cov(i, j)) < 0.1);

  // Invariants: symmetric within 1e-10, min eigenvalue >= ridge.
  CHECK((model.sigma_s() - model.sigma_s().transpose()).cwiseAbs().maxCoeff() <=
        1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.sigma_s());
  CHECK(eig.eigenvalues().minCoeff() >= 1e-3 - 1e-12);
}

TEST_CASE("gaussian_weight: 1-D closed forms and exact-1 identity") {
  Eigen::VectorXd mu_t(1), mu_s(1);
  mu_t << 1.0;
  mu_s << 0.0;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(1, 1);
  const GaussianDomainModel model(mu_t, sigma, mu_s, sigma, 1e-3);

  Eigen::VectorXd mid(1), x15(1);
  mid << 0.5;
  x15 << 1.5;
  CHECK(iwtl::gaussian_weight(model, mid) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(iwtl::gaussian_weight(model, x15) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-12));

  const GaussianDomainModel same(mu_s, sigma, mu_s, sigma, 1e-3);
  Eigen::VectorXd probe(1);
  for (double v : {-3.0, 0.0, 0.7, 5.0}) {
    probe << v;
    CHECK(iwtl::gaussian_weight(same, probe) == 1.0);  // exactly
  }
}

TEST_CASE("gaussian_weight: log-space agrees with the direct ratio") {
  Rng r(15);
  Eigen::VectorXd mu_t(3), mu_s(3);
  Eigen::MatrixXd at(3, 3), as(3, 3);
  for (int i = 0; i < 3; ++i) {
    mu_t[i] = r.next_normal();
    mu_s[i] = r.next_normal();
    for (int j = 0; j < 3; ++j) {
      at(i, j) = 0.4 * r.next_normal();
      as(i, j) = 0.4 * r.next_normal();
    }
  }
  const Eigen::MatrixXd sig_t =
      at * at.transpose() + Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd sig_s =
      as * as.transpose() + Eigen::MatrixXd::Identity(3, 3);
  const GaussianDomainModel model(mu_t, sig_t, mu_s, sig_s, 1e-3);

  const auto direct_density = [](const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& mu,
                                 const Eigen::MatrixXd& sigma) {
    const Eigen::VectorXd diff = x - mu;
    const double quad = diff.dot(sigma.inverse() * diff);
    const double det = sigma.determinant();
    const double norm =
        std::pow(2.0 * M_PI, -1.5) / std::sqrt(det);
    return norm * std::exp(-0.5 * quad);
  };
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = 2.0 * r.next_normal();
    const double via_log = iwtl::gaussian_weight(model, x);
    const double direct =
        direct_density(x, mu_t, sig_t) / direct_density(x, mu_s, sig_s);
    CHECK(std::abs(via_log - direct) / direct < 1e-9);
  }
}

TEST_CASE("weight csv: single column with header") {
  const auto dir = testutil::scratch_dir("weight_csv");
  Eigen::VectorXd w(3);
  w << 1.0, 0.25, 2.718281828459045;
  const auto file = dir / "w.csv";
  iwtl::write_weight_csv(file, w);
  std::ifstream in(file);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "weight");
  int rows = 0;
  double first = -1.0;
  while (std::getline(in, line)) {
    if (rows == 0) first = std::stod(line);
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(first == 1.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("discriminator: input validation") {
  const Dataset a = testutil::gaussian_cloud(16, 50, 2, 0.0);
  const Dataset b = testutil::gaussian_cloud(17, 50, 3, 0.0);
  CHECK_THROWS_AS(iwtl::fit_domain_discriminator(a, b, 1.0, true), Error);
  CHECK_THROWS_AS(iwtl::fit_domain_discriminator(a, a, 0.0, true), Error);
  Dataset empty;
  empty.x.resize(0, 2);
  empty.y.resize(0);
  CHECK_THROWS_AS(iwtl::fit_domain_discriminator(a, empty, 1.0, true), Error);
}
