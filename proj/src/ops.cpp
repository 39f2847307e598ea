#include "elc/ops.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "elc/error.hpp"

namespace elc {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_to_string(a.shape()) + " vs " +
                         shape_to_string(b.shape()));
  }
}

void require_rank(const Tensor& x, size_t rank, const char* op) {
  if (x.ndim() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " +
                         std::to_string(rank) + " tensor, got " +
                         shape_to_string(x.shape()));
  }
}

using Node = std::shared_ptr<detail::TensorData>;

// Adds src into dst (same length).
void axpy1(std::span<const double> src, std::vector<double>& dst) {
  for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const size_t m = a.extent(0), k = a.extent(1);
  const size_t k2 = b.extent(0), n = b.extent(1);
  if (k != k2) {
    throw DimensionError("matmul: inner extents differ, " +
                         shape_to_string(a.shape()) + " vs " +
                         shape_to_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  const double* A = a.data().data();
  const double* B = b.data().data();
  // i-k-j order: per output element the k contributions still arrive in
  // ascending order, identical to the scalar i-j-k oracle.
  for (size_t i = 0; i < m; ++i) {
    double* Ci = out.data() + i * n;
    const double* Ai = A + i * k;
    for (size_t p = 0; p < k; ++p) {
      const double aip = Ai[p];
      const double* Bp = B + p * n;
      for (size_t j = 0; j < n; ++j) Ci[j] += aip * Bp[j];
    }
  }
  Tensor c = Tensor::from_data({m, n}, std::move(out));
  if (grad_wanted({&a, &b})) {
    Node an = a.node(), bn = b.node(), cn = c.node();
    bool ga = a.requires_grad(), gb = b.requires_grad();
    Tape::active()->record({a, b}, c, [an, bn, cn, m, n, k, ga, gb] {
      const double* dC = cn->grad.data();
      if (ga) {
        double* dA = an->grad.data();
        const double* B = bn->value.data();
        for (size_t i = 0; i < m; ++i) {
          for (size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            const double* dCi = dC + i * n;
            const double* Bp = B + p * n;
            for (size_t j = 0; j < n; ++j) acc += dCi[j] * Bp[j];
            dA[i * k + p] += acc;
          }
        }
      }
      if (gb) {
        double* dB = bn->grad.data();
        const double* A = an->value.data();
        for (size_t i = 0; i < m; ++i) {
          const double* dCi = dC + i * n;
          const double* Ai = A + i * k;
          for (size_t p = 0; p < k; ++p) {
            const double aip = Ai[p];
            double* dBp = dB + p * n;
            for (size_t j = 0; j < n; ++j) dBp[j] += aip * dCi[j];
          }
        }
      }
    });
  }
  return c;
}

namespace {

// Shared machinery for same-shape binary ops.
template <typename Fwd, typename Pull>
Tensor binary_elementwise(const Tensor& a, const Tensor& b, const char* name,
                          Fwd fwd, Pull make_pull) {
  require_same_shape(a, b, name);
  const size_t n = a.size();
  std::vector<double> out(n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (size_t i = 0; i < n; ++i) out[i] = fwd(pa[i], pb[i]);
  Tensor c = Tensor::from_data(a.shape(), std::move(out));
  if (grad_wanted({&a, &b})) {
    Tape::active()->record({a, b}, c, make_pull(a.node(), b.node(), c.node()));
  }
  return c;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "add", [](double x, double y) { return x + y; },
      [](Node an, Node bn, Node cn) {
        bool ga = an->requires_grad, gb = bn->requires_grad;
        return [an, bn, cn, ga, gb] {
          if (ga) axpy1(cn->grad, an->grad);
          if (gb) axpy1(cn->grad, bn->grad);
        };
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](Node an, Node bn, Node cn) {
        bool ga = an->requires_grad, gb = bn->requires_grad;
        return [an, bn, cn, ga, gb] {
          if (ga) axpy1(cn->grad, an->grad);
          if (gb) {
            for (size_t i = 0; i < bn->grad.size(); ++i)
              bn->grad[i] -= cn->grad[i];
          }
        };
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](Node an, Node bn, Node cn) {
        bool ga = an->requires_grad, gb = bn->requires_grad;
        return [an, bn, cn, ga, gb] {
          for (size_t i = 0; i < cn->grad.size(); ++i) {
            const double g = cn->grad[i];
            if (ga) an->grad[i] += g * bn->value[i];
            if (gb) bn->grad[i] += g * an->value[i];
          }
        };
      });
}

namespace {

template <typename Fwd, typename Pull>
Tensor unary_elementwise(const Tensor& x, Fwd fwd, Pull make_pull) {
  const size_t n = x.size();
  std::vector<double> out(n);
  const double* px = x.data().data();
  for (size_t i = 0; i < n; ++i) out[i] = fwd(px[i]);
  Tensor y = Tensor::from_data(x.shape(), std::move(out));
  if (grad_wanted({&x})) {
    Tape::active()->record({x}, y, make_pull(x.node(), y.node()));
  }
  return y;
}

}  // namespace

Tensor sigmoid(const Tensor& x) {
  return unary_elementwise(
      x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](Node xn, Node yn) {
        return [xn, yn] {
          for (size_t i = 0; i < yn->grad.size(); ++i) {
            const double s = yn->value[i];
            xn->grad[i] += yn->grad[i] * s * (1.0 - s);
          }
        };
      });
}

Tensor tanh(const Tensor& x) {
  return unary_elementwise(
      x, [](double v) { return std::tanh(v); },
      [](Node xn, Node yn) {
        return [xn, yn] {
          for (size_t i = 0; i < yn->grad.size(); ++i) {
            const double t = yn->value[i];
            xn->grad[i] += yn->grad[i] * (1.0 - t * t);
          }
        };
      });
}

Tensor relu(const Tensor& x) {
  return unary_elementwise(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](Node xn, Node yn) {
        return [xn, yn] {
          for (size_t i = 0; i < yn->grad.size(); ++i) {
            if (xn->value[i] > 0.0) xn->grad[i] += yn->grad[i];
          }
        };
      });
}

Tensor scale(const Tensor& x, double c) {
  return unary_elementwise(
      x, [c](double v) { return c * v; },
      [c](Node xn, Node yn) {
        return [xn, yn, c] {
          for (size_t i = 0; i < yn->grad.size(); ++i)
            xn->grad[i] += c * yn->grad[i];
        };
      });
}

Tensor one_minus(const Tensor& x) {
  return unary_elementwise(
      x, [](double v) { return 1.0 - v; },
      [](Node xn, Node yn) {
        return [xn, yn] {
          for (size_t i = 0; i < yn->grad.size(); ++i)
            xn->grad[i] -= yn->grad[i];
        };
      });
}

Tensor add_bias(const Tensor& a, const Tensor& v) {
  require_rank(a, 2, "add_bias");
  require_rank(v, 1, "add_bias");
  const size_t r = a.extent(0), c = a.extent(1);
  if (v.extent(0) != c) {
    throw DimensionError("add_bias: bias " + shape_to_string(v.shape()) +
                         " does not match columns of " +
                         shape_to_string(a.shape()));
  }
  std::vector<double> out(r * c);
  const double* pa = a.data().data();
  const double* pv = v.data().data();
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) out[i * c + j] = pa[i * c + j] + pv[j];
  Tensor y = Tensor::from_data(a.shape(), std::move(out));
  if (grad_wanted({&a, &v})) {
    Node an = a.node(), vn = v.node(), yn = y.node();
    bool ga = a.requires_grad(), gv = v.requires_grad();
    Tape::active()->record({a, v}, y, [an, vn, yn, r, c, ga, gv] {
      if (ga) axpy1(yn->grad, an->grad);
      if (gv) {
        for (size_t i = 0; i < r; ++i)
          for (size_t j = 0; j < c; ++j) vn->grad[j] += yn->grad[i * c + j];
      }
    });
  }
  return y;
}

Tensor mul_rowvec(const Tensor& a, const Tensor& v) {
  require_rank(a, 2, "mul_rowvec");
  require_rank(v, 1, "mul_rowvec");
  const size_t r = a.extent(0), c = a.extent(1);
  if (v.extent(0) != c) {
    throw DimensionError("mul_rowvec: vector " + shape_to_string(v.shape()) +
                         " does not match columns of " +
                         shape_to_string(a.shape()));
  }
  std::vector<double> out(r * c);
  const double* pa = a.data().data();
  const double* pv = v.data().data();
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) out[i * c + j] = pa[i * c + j] * pv[j];
  Tensor y = Tensor::from_data(a.shape(), std::move(out));
  if (grad_wanted({&a, &v})) {
    Node an = a.node(), vn = v.node(), yn = y.node();
    bool ga = a.requires_grad(), gv = v.requires_grad();
    Tape::active()->record({a, v}, y, [an, vn, yn, r, c, ga, gv] {
      for (size_t i = 0; i < r; ++i) {
        for (size_t j = 0; j < c; ++j) {
          const double g = yn->grad[i * c + j];
          if (ga) an->grad[i * c + j] += g * vn->value[j];
          if (gv) vn->grad[j] += g * an->value[i * c + j];
        }
      }
    });
  }
  return y;
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  Tensor y = Tensor::scalar(acc);
  if (grad_wanted({&x})) {
    Node xn = x.node(), yn = y.node();
    Tape::active()->record({x}, y, [xn, yn] {
      const double g = yn->grad[0];
      for (size_t i = 0; i < xn->grad.size(); ++i) xn->grad[i] += g;
    });
  }
  return y;
}

Tensor reshape(const Tensor& x, std::vector<size_t> shape) {
  if (shape_product(shape) != x.size()) {
    throw DimensionError("reshape: " + shape_to_string(x.shape()) + " to " +
                         shape_to_string(shape) + " changes element count");
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  Tensor y = Tensor::from_data(std::move(shape), std::move(out));
  if (grad_wanted({&x})) {
    Node xn = x.node(), yn = y.node();
    Tape::active()->record({x}, y, [xn, yn] { axpy1(yn->grad, xn->grad); });
  }
  return y;
}

Tensor im2col3x3(const Tensor& x) {
  require_rank(x, 4, "im2col3x3");
  const size_t B = x.extent(0), H = x.extent(1), W = x.extent(2),
               C = x.extent(3);
  std::vector<double> out(B * H * W * 9 * C, 0.0);
  const double* px = x.data().data();
  const size_t row_len = 9 * C;
  for (size_t b = 0; b < B; ++b) {
    for (size_t r = 0; r < H; ++r) {
      for (size_t c = 0; c < W; ++c) {
        double* dst = out.data() + ((b * H + r) * W + c) * row_len;
        for (size_t dr = 0; dr < 3; ++dr) {
          const long rr = static_cast<long>(r) + static_cast<long>(dr) - 1;
          if (rr < 0 || rr >= static_cast<long>(H)) continue;
          for (size_t dc = 0; dc < 3; ++dc) {
            const long cc = static_cast<long>(c) + static_cast<long>(dc) - 1;
            if (cc < 0 || cc >= static_cast<long>(W)) continue;
            const double* src = px + ((b * H + rr) * W + cc) * C;
            double* d = dst + (dr * 3 + dc) * C;
            for (size_t ch = 0; ch < C; ++ch) d[ch] = src[ch];
          }
        }
      }
    }
  }
  Tensor y = Tensor::from_data({B * H * W, row_len}, std::move(out));
  if (grad_wanted({&x})) {
    Node xn = x.node(), yn = y.node();
    Tape::active()->record({x}, y, [xn, yn, B, H, W, C, row_len] {
      double* dx = xn->grad.data();
      const double* dy = yn->grad.data();
      for (size_t b = 0; b < B; ++b) {
        for (size_t r = 0; r < H; ++r) {
          for (size_t c = 0; c < W; ++c) {
            const double* src = dy + ((b * H + r) * W + c) * row_len;
            for (size_t dr = 0; dr < 3; ++dr) {
              const long rr = static_cast<long>(r) + static_cast<long>(dr) - 1;
              if (rr < 0 || rr >= static_cast<long>(H)) continue;
              for (size_t dc = 0; dc < 3; ++dc) {
                const long cc =
                    static_cast<long>(c) + static_cast<long>(dc) - 1;
                if (cc < 0 || cc >= static_cast<long>(W)) continue;
                double* d = dx + ((b * H + rr) * W + cc) * C;
                const double* s = src + (dr * 3 + dc) * C;
                for (size_t ch = 0; ch < C; ++ch) d[ch] += s[ch];
              }
            }
          }
        }
      }
    });
  }
  return y;
}

Tensor maxpool2(const Tensor& x) {
  require_rank(x, 4, "maxpool2");
  const size_t B = x.extent(0), H = x.extent(1), W = x.extent(2),
               C = x.extent(3);
  if (H % 2 != 0 || W % 2 != 0) {
    throw DimensionError("maxpool2: spatial extents must be even, got " +
                         shape_to_string(x.shape()));
  }
  const size_t Ho = H / 2, Wo = W / 2;
  std::vector<double> out(B * Ho * Wo * C);
  auto winners = std::make_shared<std::vector<uint32_t>>(out.size());
  const double* px = x.data().data();
  for (size_t b = 0; b < B; ++b) {
    for (size_t r = 0; r < Ho; ++r) {
      for (size_t c = 0; c < Wo; ++c) {
        for (size_t ch = 0; ch < C; ++ch) {
          double best = -1.0;
          uint32_t best_at = 0;
          bool first = true;
          for (size_t dr = 0; dr < 2; ++dr) {
            for (size_t dc = 0; dc < 2; ++dc) {
              const size_t off =
                  ((b * H + 2 * r + dr) * W + 2 * c + dc) * C + ch;
              if (first || px[off] > best) {
                best = px[off];
                best_at = static_cast<uint32_t>(off);
                first = false;
              }
            }
          }
          const size_t o = ((b * Ho + r) * Wo + c) * C + ch;
          out[o] = best;
          (*winners)[o] = best_at;
        }
      }
    }
  }
  Tensor y = Tensor::from_data({B, Ho, Wo, C}, std::move(out));
  if (grad_wanted({&x})) {
    Node xn = x.node(), yn = y.node();
    Tape::active()->record({x}, y, [xn, yn, winners] {
      for (size_t i = 0; i < yn->grad.size(); ++i) {
        xn->grad[(*winners)[i]] += yn->grad[i];
      }
    });
  }
  return y;
}

Tensor upsample2(const Tensor& x) {
  require_rank(x, 4, "upsample2");
  const size_t B = x.extent(0), H = x.extent(1), W = x.extent(2),
               C = x.extent(3);
  const size_t Ho = 2 * H, Wo = 2 * W;
  std::vector<double> out(B * Ho * Wo * C);
  const double* px = x.data().data();
  for (size_t b = 0; b < B; ++b) {
    for (size_t r = 0; r < Ho; ++r) {
      for (size_t c = 0; c < Wo; ++c) {
        const double* src = px + ((b * H + r / 2) * W + c / 2) * C;
        double* dst = out.data() + ((b * Ho + r) * Wo + c) * C;
        for (size_t ch = 0; ch < C; ++ch) dst[ch] = src[ch];
      }
    }
  }
  Tensor y = Tensor::from_data({B, Ho, Wo, C}, std::move(out));
  if (grad_wanted({&x})) {
    Node xn = x.node(), yn = y.node();
    Tape::active()->record({x}, y, [xn, yn, B, H, W, C, Ho, Wo] {
      for (size_t b = 0; b < B; ++b) {
        for (size_t r = 0; r < Ho; ++r) {
          for (size_t c = 0; c < Wo; ++c) {
            const double* src = yn->grad.data() + ((b * Ho + r) * Wo + c) * C;
            double* dst = xn->grad.data() + ((b * H + r / 2) * W + c / 2) * C;
            for (size_t ch = 0; ch < C; ++ch) dst[ch] += src[ch];
          }
        }
      }
    });
  }
  return y;
}

Tensor concat_channels(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw ContractError("concat_channels: no inputs");
  for (const Tensor& x : xs) require_rank(x, 4, "concat_channels");
  const size_t B = xs[0].extent(0), H = xs[0].extent(1), W = xs[0].extent(2);
  size_t Ct = 0;
  for (const Tensor& x : xs) {
    if (x.extent(0) != B || x.extent(1) != H || x.extent(2) != W) {
      throw DimensionError("concat_channels: spatial shape mismatch " +
                           shape_to_string(xs[0].shape()) + " vs " +
                           shape_to_string(x.shape()));
    }
    Ct += x.extent(3);
  }
  std::vector<double> out(B * H * W * Ct);
  const size_t cells = B * H * W;
  size_t base = 0;
  for (const Tensor& x : xs) {
    const size_t C = x.extent(3);
    const double* px = x.data().data();
    for (size_t cell = 0; cell < cells; ++cell) {
      double* dst = out.data() + cell * Ct + base;
      const double* src = px + cell * C;
      for (size_t ch = 0; ch < C; ++ch) dst[ch] = src[ch];
    }
    base += C;
  }
  Tensor y = Tensor::from_data({B, H, W, Ct}, std::move(out));
  bool wanted = false;
  for (const Tensor& x : xs) {
    if (x.requires_grad()) wanted = true;
  }
  if (Tape::active() != nullptr && wanted) {
    std::vector<Node> nodes;
    nodes.reserve(xs.size());
    for (const Tensor& x : xs) nodes.push_back(x.node());
    Node yn = y.node();
    Tape::active()->record(xs, y, [nodes, yn, cells, Ct] {
      size_t base = 0;
      for (const Node& xn : nodes) {
        const size_t C = xn->value.size() / cells;
        if (xn->requires_grad) {
          for (size_t cell = 0; cell < cells; ++cell) {
            const double* src = yn->grad.data() + cell * Ct + base;
            double* dst = xn->grad.data() + cell * C;
            for (size_t ch = 0; ch < C; ++ch) dst[ch] += src[ch];
          }
        }
        base += C;
      }
    });
  }
  return y;
}

std::vector<Tensor> split_grid_cells(const Tensor& x) {
  require_rank(x, 4, "split_grid_cells");
  const size_t B = x.extent(0), H = x.extent(1), W = x.extent(2),
               C = x.extent(3);
  std::vector<Tensor> cells;
  cells.reserve(H * W);
  const double* px = x.data().data();
  const bool wanted = grad_wanted({&x});
  for (size_t r = 0; r < H; ++r) {
    for (size_t c = 0; c < W; ++c) {
      std::vector<double> v(B * C);
      for (size_t b = 0; b < B; ++b) {
        const double* src = px + ((b * H + r) * W + c) * C;
        for (size_t ch = 0; ch < C; ++ch) v[b * C + ch] = src[ch];
      }
      Tensor cell = Tensor::from_data({B, C}, std::move(v));
      if (wanted) {
        Node xn = x.node(), cn = cell.node();
        Tape::active()->record({x}, cell, [xn, cn, B, H, W, C, r, c] {
          for (size_t b = 0; b < B; ++b) {
            double* dst = xn->grad.data() + ((b * H + r) * W + c) * C;
            const double* src = cn->grad.data() + b * C;
            for (size_t ch = 0; ch < C; ++ch) dst[ch] += src[ch];
          }
        });
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

Tensor stack_grid_cells(const std::vector<Tensor>& cells, size_t h, size_t w) {
  if (cells.size() != h * w) {
    throw DimensionError("stack_grid_cells: " + std::to_string(cells.size()) +
                         " cells for a " + std::to_string(h) + "x" +
                         std::to_string(w) + " grid");
  }
  const size_t B = cells[0].extent(0), C = cells[0].extent(1);
  for (const Tensor& cell : cells) {
    if (cell.ndim() != 2 || cell.extent(0) != B || cell.extent(1) != C) {
      throw DimensionError("stack_grid_cells: cell shape mismatch " +
                           shape_to_string(cells[0].shape()) + " vs " +
                           shape_to_string(cell.shape()));
    }
  }
  std::vector<double> out(B * h * w * C);
  for (size_t i = 0; i < cells.size(); ++i) {
    const size_t r = i / w, c = i % w;
    const double* src = cells[i].data().data();
    for (size_t b = 0; b < B; ++b) {
      double* dst = out.data() + ((b * h + r) * w + c) * C;
      for (size_t ch = 0; ch < C; ++ch) dst[ch] = src[b * C + ch];
    }
  }
  Tensor y = Tensor::from_data({B, h, w, C}, std::move(out));
  bool wanted = false;
  for (const Tensor& cell : cells) {
    if (cell.requires_grad()) wanted = true;
  }
  if (Tape::active() != nullptr && wanted) {
    std::vector<Node> nodes;
    nodes.reserve(cells.size());
    for (const Tensor& cell : cells) nodes.push_back(cell.node());
    Node yn = y.node();
    Tape::active()->record(cells, y, [nodes, yn, B, h, w, C] {
      for (size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i]->requires_grad) continue;
        const size_t r = i / w, c = i % w;
        for (size_t b = 0; b < B; ++b) {
          const double* src = yn->grad.data() + ((b * h + r) * w + c) * C;
          double* dst = nodes[i]->grad.data() + b * C;
          for (size_t ch = 0; ch < C; ++ch) dst[ch] += src[ch];
        }
      }
    });
  }
  return y;
}

Tensor weighted_cross_entropy(const Tensor& logits,
                              std::span<const int> labels,
                              std::span<const double> class_weights,
                              int ignore_id) {
  require_rank(logits, 2, "weighted_cross_entropy");
  const size_t P = logits.extent(0), n = logits.extent(1);
  if (labels.size() != P) {
    throw DimensionError("weighted_cross_entropy: " +
                         std::to_string(labels.size()) + " labels for " +
                         std::to_string(P) + " logit rows");
  }
  if (class_weights.size() != n) {
    throw DimensionError("weighted_cross_entropy: " +
                         std::to_string(class_weights.size()) +
                         " class weights for " + std::to_string(n) +
                         " classes");
  }
  const double* pl = logits.data().data();
  auto probs = std::make_shared<std::vector<double>>(P * n, 0.0);
  auto counted = std::make_shared<std::vector<uint8_t>>(P, 0);
  size_t count = 0;
  double total = 0.0;
  for (size_t p = 0; p < P; ++p) {
    const int y = labels[p];
    if (y == ignore_id) continue;
    if (y < 0 || static_cast<size_t>(y) >= n) {
      throw DataError("weighted_cross_entropy: label " + std::to_string(y) +
                      " out of range at pixel " + std::to_string(p));
    }
    const double* row = pl + p * n;
    double m = row[0];
    for (size_t c = 1; c < n; ++c) m = std::max(m, row[c]);
    double z = 0.0;
    for (size_t c = 0; c < n; ++c) z += std::exp(row[c] - m);
    const double log_z = std::log(z);
    for (size_t c = 0; c < n; ++c) {
      (*probs)[p * n + c] = std::exp(row[c] - m) / z;
    }
    total += class_weights[y] * (m + log_z - row[y]);
    (*counted)[p] = 1;
    ++count;
  }
  if (count == 0) {
    throw ContractError("weighted_cross_entropy: no counted pixels");
  }
  Tensor loss = Tensor::scalar(total / static_cast<double>(count));
  if (grad_wanted({&logits})) {
    Node ln = logits.node(), on = loss.node();
    std::vector<int> labels_copy(labels.begin(), labels.end());
    std::vector<double> weights_copy(class_weights.begin(),
                                     class_weights.end());
    Tape::active()->record(
        {logits}, loss,
        [ln, on, probs, counted, labels_copy, weights_copy, P, n, count] {
          const double g = on->grad[0] / static_cast<double>(count);
          for (size_t p = 0; p < P; ++p) {
            if (!(*counted)[p]) continue;
            const int y = labels_copy[p];
            const double wy = weights_copy[y] * g;
            double* dst = ln->grad.data() + p * n;
            const double* pr = probs->data() + p * n;
            for (size_t c = 0; c < n; ++c) dst[c] += wy * pr[c];
            dst[y] -= wy;
          }
        });
  }
  return loss;
}

}  // namespace elc
