#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace elc {

// Deterministic 64-bit-seeded generator. The raw mt19937_64 stream is fully
// specified by the standard; the float conversions below avoid
// std::uniform_real_distribution, whose output is implementation-defined.
// Same seed => bit-identical sample stream, on any platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  // Box-Muller; the second value of each pair is cached.
  double next_gaussian(double mean, double stddev);

  std::vector<double> uniform_vec(size_t n, double lo, double hi);
  std::vector<double> gaussian_vec(size_t n, double mean, double stddev);

  // Uniform integer in [0, n) without modulo bias concerns at our scales.
  size_t next_index(size_t n);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 mixing step; used to derive independent sub-streams.
uint64_t mix_seed(uint64_t x);

// Derives a sub-seed from (base seed, stream tag, index). Used to pin
// down independent randomness per purpose (params, per-step inputs,
// per-trial, per-epoch shuffles) so replacing one draw never shifts others.
uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index = 0);

}  // namespace elc
