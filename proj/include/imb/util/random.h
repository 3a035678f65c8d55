#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace imb {

inline constexpr std::string_view kPrngName = "mt19937_64+splitmix64-seeding";

// SplitMix64 finalizer; used to derive independent stream seeds.
uint64_t MixSeed(uint64_t x);
uint64_t HashCombine(uint64_t seed, uint64_t value);
uint64_t HashString(std::string_view s);

// Seeded generator with portable distributions. The std:: distributions are
// implementation-defined, so everything here is built on raw 64-bit draws
// to keep streams identical across standard libraries.
class Random {
 public:
  explicit Random(uint64_t seed) : engine_(MixSeed(seed)) {}

  uint64_t Next() { return engine_(); }
  // Uniform in [0, n).
  uint64_t UniformInt(uint64_t n);
  // Uniform in [0, 1) with 53 bits.
  double Uniform01();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  double Normal();

  // `k` distinct indices from [0, n), in draw order.
  std::vector<int> SampleWithoutReplacement(int n, int k);
  // Same, writing into a caller-owned buffer (no allocation in hot loops).
  void SampleWithoutReplacement(int n, int k, int* out);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace imb
