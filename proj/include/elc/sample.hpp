#pragma once

#include "elc/random.hpp"
#include "elc/tensor.hpp"

namespace elc {

// i.i.d. tensor draws; deterministic for a fixed Rng state.
Tensor sample_uniform(Rng& rng, std::vector<size_t> shape, double lo,
                      double hi);
Tensor sample_gaussian(Rng& rng, std::vector<size_t> shape, double mean,
                       double stddev);

}  // namespace elc
