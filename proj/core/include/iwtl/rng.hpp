#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace iwtl {

// Deterministic, platform-independent PRNG (SplitMix64 core).
//
// Standard-library engines/distributions are not byte-stable across
// implementations, so everything that must reproduce bit-exactly (data
// generation, fold shuffling) goes through this generator. Component streams
// are derived from one root seed by hashing a component label and index, so
// adding a consumer never perturbs the draws of existing ones.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream for a named component of a run.
  static Rng derive(std::uint64_t root_seed, std::string_view component,
                    std::uint64_t index = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

  // Uniform integer in [0, n). Rejection-sampled; unbiased for any n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via Box-Muller (fresh pair per call; no cached spare, so
  // the stream position depends only on the number of calls).
  double next_normal();

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// FNV-1a 64-bit digest; used for file/dataset fingerprints in manifests.
std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t seed = 14695981039346656037ull);
std::uint64_t fnv1a(std::string_view s);

}  // namespace iwtl
