#pragma once

#include <unistd.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iwtl/dataset.hpp"
#include "iwtl/rng.hpp"

namespace testutil {

// Two spherical Gaussian blobs separated along feature 0: class 0 at the
// origin, class 1 at x0 = sep.
inline iwtl::Dataset two_blob(std::uint64_t seed, Eigen::Index n,
                              Eigen::Index d, double sep,
                              double positive_rate = 0.5) {
  iwtl::Rng rng(seed);
  iwtl::Dataset out;
  out.x.resize(n, d);
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool pos = rng.next_double() < positive_rate;
    out.y[i] = pos ? 1 : 0;
    for (Eigen::Index j = 0; j < d; ++j)
      out.x(i, j) = rng.next_normal() + (pos && j == 0 ? sep : 0.0);
  }
  return out;
}

// Unlabeled (label 0) sample from N(mean, I) in d dimensions.
inline iwtl::Dataset gaussian_cloud(std::uint64_t seed, Eigen::Index n,
                                    Eigen::Index d, double mean) {
  iwtl::Rng rng(seed);
  iwtl::Dataset out;
  out.x.resize(n, d);
  out.y = Eigen::VectorXi::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out.x(i, j) = mean + rng.next_normal();
  return out;
}

// Numerically stable binary log loss on a raw score: softplus(s) - y*s.
inline double log_loss_ref(double score, double y01) {
  const double softplus =
      std::max(score, 0.0) + std::log1p(std::exp(-std::abs(score)));
  return softplus - y01 * score;
}

// Mann-Whitney AUC with midrank tie handling: probability a random positive
// scores above a random negative.
inline double rank_auc(std::vector<double> neg, std::vector<double> pos) {
  struct Entry {
    double score;
    int label;
  };
  std::vector<Entry> all;
  all.reserve(neg.size() + pos.size());
  for (double s : neg) all.push_back({s, 0});
  for (double s : pos) all.push_back({s, 1});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (all[k].label == 1) rank_sum_pos += midrank;
    i = j;
  }
  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("iwtl_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
