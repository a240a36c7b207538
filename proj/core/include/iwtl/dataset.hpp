#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwtl/rng.hpp"

namespace iwtl {

// All recoverable library failures throw this; the CLI maps it to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Labeled tabular data: n rows, d features, binary labels (1 = rare/positive
// class, e.g. "injury").
struct Dataset {
  Eigen::MatrixXd x;   // n x d, row-major semantics (row = sample)
  Eigen::VectorXi y;   // n, values in {0, 1}

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
  bool empty() const { return x.rows() == 0; }

  Eigen::Index count_positive() const;

  // Throws Error unless labels are 0/1, sizes agree, and values are finite.
  void validate() const;

  // CSV with header "f0,...,f{d-1},label"; values serialized with enough
  // digits to round-trip bit-exactly.
  static Dataset load_csv(const std::filesystem::path& path);
  void save_csv(const std::filesystem::path& path) const;

  // Order-sensitive fingerprint of the exact stored bytes.
  std::uint64_t digest() const;
};

// Rows of both datasets stacked (a on top), labels concatenated.
Dataset concat(const Dataset& a, const Dataset& b);

// Per-feature affine map to zero mean / unit variance, fit on one or more
// datasets pooled. Features with zero variance keep scale 1.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const std::vector<const Dataset*>& parts);
  Dataset apply(const Dataset& d) const;
};

// Deterministic stratified k-fold assignment: per class, samples are
// shuffled with `rng` and dealt round-robin. Returns per-fold row indices
// (each sorted ascending). Throws Error if a class is absent or k < 2.
std::vector<std::vector<Eigen::Index>> stratified_folds(
    const Eigen::VectorXi& y, int k, Rng& rng);

}  // namespace iwtl
