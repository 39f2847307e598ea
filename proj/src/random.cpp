#include "elc/random.hpp"

#include <cmath>

#include "elc/error.hpp"

namespace elc {

double Rng::next_gaussian(double mean, double stddev) {
  if (stddev <= 0.0) {
    throw ContractError("next_gaussian: stddev must be > 0, got " +
                        std::to_string(stddev));
  }
  if (have_spare_) {
    have_spare_ = false;
    return mean + stddev * spare_;
  }
  // 1 - u keeps the argument of log strictly positive.
  double u1 = 1.0 - next_uniform();
  double u2 = next_uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return mean + stddev * radius * std::cos(angle);
}

std::vector<double> Rng::uniform_vec(size_t n, double lo, double hi) {
  if (!(lo < hi)) {
    throw ContractError("uniform_vec: require lo < hi, got [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = next_uniform(lo, hi);
  return out;
}

std::vector<double> Rng::gaussian_vec(size_t n, double mean, double stddev) {
  if (stddev <= 0.0) {
    throw ContractError("gaussian_vec: stddev must be > 0, got " +
                        std::to_string(stddev));
  }
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = next_gaussian(mean, stddev);
  return out;
}

size_t Rng::next_index(size_t n) {
  return static_cast<size_t>(next_uniform() * static_cast<double>(n)) % n;
}

uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index) {
  // FNV-1a over the tag, then two mixing rounds against base and index.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_seed(mix_seed(base ^ h) ^ mix_seed(index ^ 0xa0761d6478bd642fULL));
}

}  // namespace elc
