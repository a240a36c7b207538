#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "iwtl/dataset.hpp"

using iwtl::Dataset;
using iwtl::Error;
using iwtl::Rng;
using iwtl::Standardizer;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
}

}  // namespace

TEST_CASE("dataset: direct CSV read-back") {
  const auto dir = testutil::scratch_dir("csv_read");
  const auto file = dir / "t.csv";
  write_file(file, "f1,f2,label\n0.5,1.0,1\n0.1,0.2,0\n");
  const Dataset d = Dataset::load_csv(file);
  CHECK(d.n() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.x(0, 0) == 0.5);
  CHECK(d.x(1, 1) == 0.2);
  CHECK(d.y[0] == 1);
  CHECK(d.y[1] == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset: malformed cell error names row and column") {
  const auto dir = testutil::scratch_dir("csv_err");
  const auto file = dir / "bad.csv";
  write_file(file, "f1,f2,label\nabc,1.0,1\n0.1,0.2,0\n");
  try {
    Dataset::load_csv(file);
    FAIL("expected an error for the non-numeric cell");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("f1") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset: optional domain column is accepted and checked") {
  const auto dir = testutil::scratch_dir("csv_domain");
  const auto file = dir / "mix.csv";
  write_file(file,
             "f0,f1,label,domain\n1.0,2.0,1,source\n3.0,4.0,0,target\n");
  const Dataset d = Dataset::load_csv(file);
  CHECK(d.n() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.x(1, 1) == 4.0);

  const auto bad = dir / "bad_domain.csv";
  write_file(bad, "f0,label,domain\n1.0,1,elsewhere\n");
  CHECK_THROWS_AS(Dataset::load_csv(bad), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset: save/load round-trip is bit-exact") {
  const auto dir = testutil::scratch_dir("csv_roundtrip");
  Dataset d = testutil::two_blob(19, 100, 5, 2.0);
  d.x(0, 0) = 1.0 / 3.0;
  d.x(1, 1) = 1e-17;
  d.x(2, 2) = -12345.6789012345678;
  const auto file = dir / "r.csv";
  d.save_csv(file);
  const Dataset back = Dataset::load_csv(file);
  REQUIRE(back.n() == d.n());
  REQUIRE(back.dim() == d.dim());
  CHECK(back.x == d.x);
  CHECK(back.y == d.y);
  CHECK(back.digest() == d.digest());

  // Idempotence: write the reloaded copy, reload again.
  const auto file2 = dir / "r2.csv";
  back.save_csv(file2);
  CHECK(Dataset::load_csv(file2).x == d.x);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset: validate rejects bad content") {
  Dataset d = testutil::two_blob(1, 10, 2, 1.0);
  CHECK_NOTHROW(d.validate());

  Dataset bad_label = d;
  bad_label.y[0] = 2;
  CHECK_THROWS_AS(bad_label.validate(), Error);

  Dataset bad_value = d;
  bad_value.x(0, 0) = std::nan("");
  CHECK_THROWS_AS(bad_value.validate(), Error);

  Dataset bad_shape = d;
  bad_shape.y.resize(3);
  bad_shape.y.setZero();
  CHECK_THROWS_AS(bad_shape.validate(), Error);
}

TEST_CASE("dataset: digest is content-sensitive") {
  Dataset a = testutil::two_blob(2, 30, 3, 1.0);
  Dataset b = a;
  CHECK(a.digest() == b.digest());
  b.x(4, 1) += 1e-12;
  CHECK(a.digest() != b.digest());
  Dataset c = a;
  c.y[0] = 1 - c.y[0];
  CHECK(a.digest() != c.digest());
}

TEST_CASE("dataset: concat stacks a on top of b") {
  const Dataset a = testutil::two_blob(3, 4, 2, 1.0);
  const Dataset b = testutil::two_blob(4, 6, 2, 1.0);
  const Dataset c = iwtl::concat(a, b);
  CHECK(c.n() == 10);
  CHECK(c.x.topRows(4) == a.x);
  CHECK(c.x.bottomRows(6) == b.x);
  CHECK(c.y.head(4) == a.y);
  CHECK(c.y.tail(6) == b.y);

  Dataset wrong_dim = testutil::two_blob(5, 3, 3, 1.0);
  CHECK_THROWS_AS(iwtl::concat(a, wrong_dim), Error);
}

TEST_CASE("standardizer: two-point and constant columns") {
  Dataset d;
  d.x.resize(2, 2);
  d.x << 1.0, 5.0, 3.0, 5.0;
  d.y = Eigen::VectorXi::Zero(2);
  const Standardizer s = Standardizer::fit({&d});
  CHECK(s.mean[0] == 2.0);
  CHECK(s.scale[0] == 1.0);  // population sd of {1,3}
  CHECK(s.mean[1] == 5.0);
  CHECK(s.scale[1] == 1.0);  // zero-variance rule
  const Dataset t = s.apply(d);
  CHECK(t.x(0, 0) == -1.0);
  CHECK(t.x(1, 0) == 1.0);
  CHECK(t.x(0, 1) == 0.0);
}

TEST_CASE("standardizer: pooled transform has zero mean unit variance") {
  const Dataset a = testutil::two_blob(7, 120, 5, 2.0);
  const Dataset b = testutil::two_blob(8, 80, 5, 2.0);
  const Standardizer s = Standardizer::fit({&a, &b});
  const Dataset ta = s.apply(a);
  const Dataset tb = s.apply(b);
  for (Eigen::Index j = 0; j < 5; ++j) {
    double sum = ta.x.col(j).sum() + tb.x.col(j).sum();
    double sum2 = ta.x.col(j).squaredNorm() + tb.x.col(j).squaredNorm();
    const double n = 200.0;
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(var - 1.0) < 1e-10);
  }
}

TEST_CASE("standardizer: affine examples and inverse round-trip") {
  Standardizer s;
  s.mean.resize(1);
  s.scale.resize(1);
  s.mean << 2.0;
  s.scale << 1.0;
  Dataset d;
  d.x.resize(1, 1);
  d.x << 2.0;
  d.y = Eigen::VectorXi::Zero(1);
  CHECK(s.apply(d).x(0, 0) == 0.0);

  s.mean << 0.0;
  s.scale << 2.0;
  d.x << 4.0;
  CHECK(s.apply(d).x(0, 0) == 2.0);

  // Inverse-apply (x*scale + mean) recovers the original features.
  const Dataset orig = testutil::two_blob(9, 50, 4, 3.0);
  const Standardizer fitted = Standardizer::fit({&orig});
  const Dataset fwd = fitted.apply(orig);
  Eigen::MatrixXd rec = fwd.x;
  for (Eigen::Index j = 0; j < rec.cols(); ++j)
    rec.col(j) = rec.col(j) * fitted.scale[j] + Eigen::VectorXd::Constant(rec.rows(), fitted.mean[j]);
  for (Eigen::Index i = 0; i < rec.rows(); ++i)
    for (Eigen::Index j = 0; j < rec.cols(); ++j)
      CHECK(rec(i, j) == doctest::Approx(orig.x(i, j)).epsilon(1e-12));

  CHECK_THROWS_AS(Standardizer::fit({}), Error);
}

TEST_CASE("stratified folds: balanced deal, exhaustive cover, determinism") {
  Eigen::VectorXi y(100);
  for (int i = 0; i < 100; ++i) y[i] = i < 20 ? 1 : 0;
  Rng r1(5), r2(5);
  const auto folds = iwtl::stratified_folds(y, 5, r1);
  const auto folds_again = iwtl::stratified_folds(y, 5, r2);
  REQUIRE(folds.size() == 5);
  CHECK(folds == folds_again);

  std::vector<int> seen(100, 0);
  for (const auto& f : folds) {
    CHECK(f.size() == 20);
    int pos = 0;
    for (auto idx : f) {
      seen[static_cast<std::size_t>(idx)] += 1;
      pos += y[idx];
    }
    CHECK(pos == 4);  // 20 positives dealt across 5 folds
    CHECK(std::is_sorted(f.begin(), f.end()));
  }
  CHECK(std::accumulate(seen.begin(), seen.end(), 0) == 100);
  CHECK(*std::min_element(seen.begin(), seen.end()) == 1);

  Rng r3(5);
  CHECK_THROWS_AS(iwtl::stratified_folds(Eigen::VectorXi::Zero(10), 2, r3),
                  Error);
  Rng r4(5);
  CHECK_THROWS_AS(iwtl::stratified_folds(y, 1, r4), Error);
}
