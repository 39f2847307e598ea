#pragma once

#include <string>
#include <utility>
#include <vector>

#include "elc/random.hpp"
#include "elc/tensor.hpp"

namespace elc {

enum class Activation { Identity, Sigmoid, Tanh };

Tensor apply_activation(Activation a, const Tensor& x);

// ---------------------------------------------------------------------
// Parameter records. Weight matrices map row vectors from the left
// (x [batch x in] times W_x [in x hidden]), matching
//   h = act_h(x W_x + h_prev W_h + b_h)
//   y = act_y(h W_y + b_y)
// for the vanilla cell and the corresponding gate equations for LSTM/GRU.
// ---------------------------------------------------------------------

struct VanillaRnnParams {
  Tensor W_x;  // [in x hidden]
  Tensor W_h;  // [hidden x hidden]
  Tensor W_y;  // [hidden x out]
  Tensor b_h;  // [hidden]
  Tensor b_y;  // [out]
  Activation act_hidden = Activation::Tanh;
  Activation act_output = Activation::Identity;
};

struct LstmParams {
  Tensor W_xi, W_xf, W_xc, W_xo;  // [in x hidden]
  Tensor W_hi, W_hf, W_hc, W_ho;  // [hidden x hidden]
  Tensor w_ci, w_cf, w_co;        // [hidden], elementwise peepholes
  Tensor b_i, b_f, b_c, b_o;      // [hidden]
  Activation act_input_gate = Activation::Sigmoid;
  Activation act_forget_gate = Activation::Sigmoid;
  Activation act_output_gate = Activation::Sigmoid;
  Activation act_candidate = Activation::Tanh;
  Activation act_hidden = Activation::Tanh;
  bool use_peepholes = true;
};

struct GruParams {
  Tensor W_xr, W_xu, W_xc;  // [in x hidden]
  Tensor W_hr, W_hu, W_hc;  // [hidden x hidden]
  Tensor b_r, b_u, b_c;     // [hidden]
  Activation act_reset = Activation::Sigmoid;
  Activation act_update = Activation::Sigmoid;
  Activation act_candidate = Activation::Tanh;
};

// Recurrent state. `c` is defined only for the LSTM families.
struct CellState {
  Tensor h;
  Tensor c;
};

// ---------------------------------------------------------------------
// Single-step cell functions. All take [batch x in] inputs and
// [batch x hidden] states; batch = 1 recovers the batch-free equations.
// ---------------------------------------------------------------------

// Returns (h, y).
std::pair<Tensor, Tensor> vanilla_rnn_step(const VanillaRnnParams& p,
                                           const Tensor& x,
                                           const Tensor& h_prev);

// Gates with peephole terms:
//   i = act_i(x W_xi + h W_hi + w_ci . c_prev + b_i)
//   f = act_f(x W_xf + h W_hf + w_cf . c_prev + b_f)
//   c = f . c_prev + i . act_c(x W_xc + h W_hc + b_c)
//   o = act_o(x W_xo + h W_ho + w_co . c + b_o)
//   h = o . act_h(c)
CellState lstm_step(const LstmParams& p, const Tensor& x,
                    const CellState& state);

//   r = act_r(x W_xr + h W_hr + b_r)
//   u = act_u(x W_xu + h W_hu + b_u)
//   c = act_c(x W_xc + r . (h W_hc) + b_c)
//   h = (1 - u) . h_prev + u . c
Tensor gru_step(const GruParams& p, const Tensor& x, const Tensor& h_prev);

// ---------------------------------------------------------------------
// Initialization: weights ~ N(0, weight_stddev^2), biases and peepholes
// constant bias_value. Deterministic under the Rng's seed.
// ---------------------------------------------------------------------

VanillaRnnParams init_vanilla_rnn(size_t in, size_t hidden, size_t out,
                                  Rng& rng, double weight_stddev,
                                  double bias_value);
LstmParams init_lstm(size_t in, size_t hidden, Rng& rng, double weight_stddev,
                     double bias_value);
GruParams init_gru(size_t in, size_t hidden, Rng& rng, double weight_stddev,
                   double bias_value);

size_t param_count(const VanillaRnnParams& p);
size_t param_count(const LstmParams& p);
size_t param_count(const GruParams& p);

// Name/tensor pairs in a stable order, for checkpoints and gradient sweeps.
std::vector<std::pair<std::string, Tensor>> named_params(
    const std::string& prefix, const VanillaRnnParams& p);
std::vector<std::pair<std::string, Tensor>> named_params(
    const std::string& prefix, const LstmParams& p);
std::vector<std::pair<std::string, Tensor>> named_params(
    const std::string& prefix, const GruParams& p);

}  // namespace elc
