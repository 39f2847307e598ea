#include "elc/cells.hpp"

#include "elc/error.hpp"
#include "elc/ops.hpp"
#include "elc/sample.hpp"

namespace elc {

Tensor apply_activation(Activation a, const Tensor& x) {
  switch (a) {
    case Activation::Identity:
      return x;
    case Activation::Sigmoid:
      return sigmoid(x);
    case Activation::Tanh:
      return tanh(x);
  }
  throw ContractError("apply_activation: unknown activation");
}

std::pair<Tensor, Tensor> vanilla_rnn_step(const VanillaRnnParams& p,
                                           const Tensor& x,
                                           const Tensor& h_prev) {
  Tensor h = apply_activation(
      p.act_hidden,
      add_bias(add(matmul(x, p.W_x), matmul(h_prev, p.W_h)), p.b_h));
  Tensor y = apply_activation(p.act_output, add_bias(matmul(h, p.W_y), p.b_y));
  return {h, y};
}

CellState lstm_step(const LstmParams& p, const Tensor& x,
                    const CellState& state) {
  if (!state.c.defined()) {
    throw ContractError("lstm_step: cell state missing from CellState");
  }
  const Tensor& h_prev = state.h;
  const Tensor& c_prev = state.c;
  Tensor pre_i = add(matmul(x, p.W_xi), matmul(h_prev, p.W_hi));
  Tensor pre_f = add(matmul(x, p.W_xf), matmul(h_prev, p.W_hf));
  if (p.use_peepholes) {
    pre_i = add(pre_i, mul_rowvec(c_prev, p.w_ci));
    pre_f = add(pre_f, mul_rowvec(c_prev, p.w_cf));
  }
  Tensor i = apply_activation(p.act_input_gate, add_bias(pre_i, p.b_i));
  Tensor f = apply_activation(p.act_forget_gate, add_bias(pre_f, p.b_f));
  Tensor cand = apply_activation(
      p.act_candidate,
      add_bias(add(matmul(x, p.W_xc), matmul(h_prev, p.W_hc)), p.b_c));
  Tensor c = add(mul(f, c_prev), mul(i, cand));
  Tensor pre_o = add(matmul(x, p.W_xo), matmul(h_prev, p.W_ho));
  if (p.use_peepholes) {
    pre_o = add(pre_o, mul_rowvec(c, p.w_co));
  }
  Tensor o = apply_activation(p.act_output_gate, add_bias(pre_o, p.b_o));
  Tensor h = mul(o, apply_activation(p.act_hidden, c));
  return CellState{h, c};
}

Tensor gru_step(const GruParams& p, const Tensor& x, const Tensor& h_prev) {
  Tensor r = apply_activation(
      p.act_reset,
      add_bias(add(matmul(x, p.W_xr), matmul(h_prev, p.W_hr)), p.b_r));
  Tensor u = apply_activation(
      p.act_update,
      add_bias(add(matmul(x, p.W_xu), matmul(h_prev, p.W_hu)), p.b_u));
  Tensor c = apply_activation(
      p.act_candidate,
      add_bias(add(matmul(x, p.W_xc), mul(r, matmul(h_prev, p.W_hc))), p.b_c));
  return add(mul(one_minus(u), h_prev), mul(u, c));
}

namespace {

Tensor weight(size_t rows, size_t cols, Rng& rng, double stddev) {
  Tensor t = stddev > 0.0
                 ? sample_gaussian(rng, {rows, cols}, 0.0, stddev)
                 : Tensor::zeros({rows, cols});
  t.set_requires_grad(true);
  return t;
}

Tensor bias(size_t n, double v) {
  Tensor t = Tensor::full({n}, v);
  t.set_requires_grad(true);
  return t;
}

}  // namespace

VanillaRnnParams init_vanilla_rnn(size_t in, size_t hidden, size_t out,
                                  Rng& rng, double weight_stddev,
                                  double bias_value) {
  VanillaRnnParams p;
  p.W_x = weight(in, hidden, rng, weight_stddev);
  p.W_h = weight(hidden, hidden, rng, weight_stddev);
  p.W_y = weight(hidden, out, rng, weight_stddev);
  p.b_h = bias(hidden, bias_value);
  p.b_y = bias(out, bias_value);
  return p;
}

LstmParams init_lstm(size_t in, size_t hidden, Rng& rng, double weight_stddev,
                     double bias_value) {
  LstmParams p;
  p.W_xi = weight(in, hidden, rng, weight_stddev);
  p.W_xf = weight(in, hidden, rng, weight_stddev);
  p.W_xc = weight(in, hidden, rng, weight_stddev);
  p.W_xo = weight(in, hidden, rng, weight_stddev);
  p.W_hi = weight(hidden, hidden, rng, weight_stddev);
  p.W_hf = weight(hidden, hidden, rng, weight_stddev);
  p.W_hc = weight(hidden, hidden, rng, weight_stddev);
  p.W_ho = weight(hidden, hidden, rng, weight_stddev);
  p.w_ci = bias(hidden, bias_value);
  p.w_cf = bias(hidden, bias_value);
  p.w_co = bias(hidden, bias_value);
  p.b_i = bias(hidden, bias_value);
  p.b_f = bias(hidden, bias_value);
  p.b_c = bias(hidden, bias_value);
  p.b_o = bias(hidden, bias_value);
  return p;
}

GruParams init_gru(size_t in, size_t hidden, Rng& rng, double weight_stddev,
                   double bias_value) {
  GruParams p;
  p.W_xr = weight(in, hidden, rng, weight_stddev);
  p.W_xu = weight(in, hidden, rng, weight_stddev);
  p.W_xc = weight(in, hidden, rng, weight_stddev);
  p.W_hr = weight(hidden, hidden, rng, weight_stddev);
  p.W_hu = weight(hidden, hidden, rng, weight_stddev);
  p.W_hc = weight(hidden, hidden, rng, weight_stddev);
  p.b_r = bias(hidden, bias_value);
  p.b_u = bias(hidden, bias_value);
  p.b_c = bias(hidden, bias_value);
  return p;
}

namespace {

size_t total(const std::vector<std::pair<std::string, Tensor>>& named) {
  size_t n = 0;
  for (const auto& [name, t] : named) n += t.size();
  return n;
}

}  // namespace

std::vector<std::pair<std::string, Tensor>> named_params(
    const std::string& prefix, const VanillaRnnParams& p) {
  return {{prefix + ".W_x", p.W_x},
          {prefix + ".W_h", p.W_h},
          {prefix + ".W_y", p.W_y},
          {prefix + ".b_h", p.b_h},
          {prefix + ".b_y", p.b_y}};
}

std::vector<std::pair<std::string, Tensor>> named_params(
    const std::string& prefix, const LstmParams& p) {
  return {{prefix + ".W_xi", p.W_xi}, {prefix + ".W_xf", p.W_xf},
          {prefix + ".W_xc", p.W_xc}, {prefix + ".W_xo", p.W_xo},
          {prefix + ".W_hi", p.W_hi}, {prefix + ".W_hf", p.W_hf},
          {prefix + ".W_hc", p.W_hc}, {prefix + ".W_ho", p.W_ho},
          {prefix + ".w_ci", p.w_ci}, {prefix + ".w_cf", p.w_cf},
          {prefix + ".w_co", p.w_co}, {prefix + ".b_i", p.b_i},
          {prefix + ".b_f", p.b_f},   {prefix + ".b_c", p.b_c},
          {prefix + ".b_o", p.b_o}};
}

std::vector<std::pair<std::string, Tensor>> named_params(
    const std::string& prefix, const GruParams& p) {
  return {{prefix + ".W_xr", p.W_xr}, {prefix + ".W_xu", p.W_xu},
          {prefix + ".W_xc", p.W_xc}, {prefix + ".W_hr", p.W_hr},
          {prefix + ".W_hu", p.W_hu}, {prefix + ".W_hc", p.W_hc},
          {prefix + ".b_r", p.b_r},   {prefix + ".b_u", p.b_u},
          {prefix + ".b_c", p.b_c}};
}

size_t param_count(const VanillaRnnParams& p) {
  return total(named_params("p", p));
}
size_t param_count(const LstmParams& p) { return total(named_params("p", p)); }
size_t param_count(const GruParams& p) { return total(named_params("p", p)); }

}  // namespace elc
