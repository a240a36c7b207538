#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "iwtl/rng.hpp"

using iwtl::Rng;

TEST_CASE("rng: same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: derived streams are independent of each other") {
  Rng a = Rng::derive(7, "synth");
  Rng b = Rng::derive(7, "folds");
  Rng a2 = Rng::derive(7, "synth");
  bool all_equal = true;
  for (int i = 0; i < 20; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    CHECK(va == a2.next_u64());
  }
  CHECK_FALSE(all_equal);
  // Distinct index, same label: also a distinct stream.
  CHECK(Rng::derive(7, "synth", 0).next_u64() !=
        Rng::derive(7, "synth", 1).next_u64());
}

TEST_CASE("rng: next_double in [0,1), next_below in range") {
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (std::uint64_t n : {1ull, 2ull, 7ull, 1000ull}) {
    for (int i = 0; i < 200; ++i) CHECK(r.next_below(n) < n);
  }
  CHECK(r.next_below(1) == 0);
}

TEST_CASE("rng: normal draws have roughly standard moments") {
  Rng r(11);
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.next_normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("rng: shuffle permutes") {
  Rng r(5);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  const std::vector<int> original = v;
  r.shuffle(v);
  CHECK(v != original);  // 50! to 1 odds against
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == original);
}

TEST_CASE("rng: fnv1a digests are stable and content-sensitive") {
  CHECK(iwtl::fnv1a("abc") == iwtl::fnv1a("abc"));
  CHECK(iwtl::fnv1a("abc") != iwtl::fnv1a("abd"));
  CHECK(iwtl::fnv1a("") == 14695981039346656037ull);
}
