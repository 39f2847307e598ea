#include "elc/sample.hpp"

namespace elc {

Tensor sample_uniform(Rng& rng, std::vector<size_t> shape, double lo,
                      double hi) {
  size_t n = shape_product(shape);
  return Tensor::from_data(std::move(shape), rng.uniform_vec(n, lo, hi));
}

Tensor sample_gaussian(Rng& rng, std::vector<size_t> shape, double mean,
                       double stddev) {
  size_t n = shape_product(shape);
  return Tensor::from_data(std::move(shape), rng.gaussian_vec(n, mean, stddev));
}

}  // namespace elc
