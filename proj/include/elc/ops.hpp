#pragma once

#include <array>
#include <span>
#include <vector>

#include "elc/tape.hpp"
#include "elc/tensor.hpp"

namespace elc {

// Differentiable tensor operations. Every op records its gradient rule on
// the active tape when any input requires gradients; with no active tape
// the ops are plain forward computations.
//
// Reductions and matrix products accumulate in ascending flat-index order
// (innermost index ascending) so results are reproducible bit-for-bit and
// match the scalar test oracles exactly.

// --- linear algebra ---------------------------------------------------

// [m x k] * [k x n] -> [m x n].
Tensor matmul(const Tensor& a, const Tensor& b);

// --- elementwise ------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
// c * x
Tensor scale(const Tensor& x, double c);
// 1 - x
Tensor one_minus(const Tensor& x);

// Row-wise broadcasts against the trailing axis of a rank-2 tensor.
// a: [r x c], v: [c].
Tensor add_bias(const Tensor& a, const Tensor& v);
Tensor mul_rowvec(const Tensor& a, const Tensor& v);

// --- reductions / shape -----------------------------------------------

// Sum of all elements, ascending flat order -> scalar [1].
Tensor sum(const Tensor& x);

// Same data, new shape (copies; gradient is identity).
Tensor reshape(const Tensor& x, std::vector<size_t> shape);

// --- spatial ops on [B, H, W, C] ----------------------------------------

// 3x3 patch extraction with zero padding 1: [B,H,W,C] -> [B*H*W, 9*C].
// Column order is ((dr*3+dc)*C + c) so a conv is im2col * weight[9C x F].
Tensor im2col3x3(const Tensor& x);

// 2x2 max pooling, stride 2; extents must be even. Ties resolve to the
// first element in (0,0),(0,1),(1,0),(1,1) scan order.
Tensor maxpool2(const Tensor& x);

// Nearest-neighbor 2x upsampling.
Tensor upsample2(const Tensor& x);

// Concatenation along the channel axis; all inputs share [B,H,W].
Tensor concat_channels(const std::vector<Tensor>& xs);

// Per-cell views of a feature grid: element (r*W + c) is the [B,C] matrix
// of features at grid position (r, c).
std::vector<Tensor> split_grid_cells(const Tensor& x);

// Inverse of split_grid_cells for computed hidden states:
// cells[r*w + c] is [B,C]; result is [B,h,w,C].
Tensor stack_grid_cells(const std::vector<Tensor>& cells, size_t h, size_t w);

// --- loss ---------------------------------------------------------------

// Mean over counted pixels of weight[label] * (-log softmax(logits)[label]).
// logits: [P x n]; labels: length P with values in [0, n) or ignore_id;
// class_weights: length n. Softmax uses max subtraction. Pixels labeled
// ignore_id contribute nothing and are not counted.
Tensor weighted_cross_entropy(const Tensor& logits,
                              std::span<const int> labels,
                              std::span<const double> class_weights,
                              int ignore_id = -1);

}  // namespace elc
