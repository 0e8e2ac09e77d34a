#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace labeldist {

// The one PRNG algorithm used by the whole toolkit is std::mt19937_64,
// whose output sequence is pinned by the standard. Bounded draws,
// shuffles, and normal variates are implemented here from raw engine
// output instead of <random> distributions, whose results are
// implementation-defined and would break cross-platform reproducibility.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64(std::uint64_t x);

// Labeled seed derivation: each component draws from its own stream so
// adding a consumer never perturbs another component's randomness.
std::uint64_t derive_seed(std::uint64_t root, std::string_view component);
std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                          std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller; the spare variate is cached so the
  // stream stays sequentially deterministic.
  double normal();

  // Fisher-Yates over indices [0, n).
  std::vector<std::uint32_t> permutation(std::uint32_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(below(i + 1));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace labeldist
