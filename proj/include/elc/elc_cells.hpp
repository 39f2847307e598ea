#pragma once

#include <array>
#include <cstdint>

#include "elc/cells.hpp"

namespace elc {

// Long-range conditioning parameters: the current step is conditioned on an
// average of the previous hidden state and `scale` states spaced `stride`
// apart. References before the start of the sequence resolve to the zero
// state but still count in the normalizer.
struct ElcSpec {
  size_t stride = 1;  // s
  size_t scale = 1;   // k
};

// Append-only record of per-step states, indexed by time step 1..length().
class HiddenHistory {
 public:
  void push(CellState s) { states_.push_back(std::move(s)); }
  size_t length() const { return states_.size(); }
  bool in_range(long t) const {
    return t >= 1 && t <= static_cast<long>(states_.size());
  }
  const CellState& at_time(size_t t) const;

 private:
  std::vector<CellState> states_;
};

// H_t = (h_{t-1} + sum_{i=1..k} h_{t-i*s}) / (k + 1), zero for references
// before step 1. k = 1 reduces to the half-sum of h_{t-1} and h_{t-s}.
Tensor elc_aggregate(const HiddenHistory& history, size_t t,
                     const ElcSpec& spec);

// Same average over the cell states (LSTM families).
Tensor elc_aggregate_cell(const HiddenHistory& history, size_t t,
                          const ElcSpec& spec);

// Vanilla RNN step with the previous hidden state replaced by the
// long-range aggregate.
std::pair<Tensor, Tensor> rnn_elc_step(const VanillaRnnParams& p,
                                       const Tensor& x,
                                       const HiddenHistory& history, size_t t,
                                       const ElcSpec& spec);

// GRU step with the precomputed aggregate H substituted for the previous
// hidden state, including in the final convex combination. No extra weights
// over the base cell.
Tensor gru_elc_step(const GruParams& p, const Tensor& x, const Tensor& H);

// LSTM step on aggregated hidden and cell states (H_h for h_{t-1},
// H_c for c_{t-1}).
CellState lstm_elc_step(const LstmParams& p, const Tensor& x,
                        const Tensor& H_h, const Tensor& H_c);

// Hidden states laid out on a 2D grid, plus a fill mask. During a sweep the
// cells are stored in the sweep's own (reflected) frame; the finished grid
// returned by sweeps is in original coordinates.
struct HiddenGrid {
  HiddenGrid() = default;
  HiddenGrid(size_t height, size_t width, size_t batch, size_t state_width);

  size_t height = 0, width = 0;
  size_t batch = 0, state_width = 0;
  std::vector<Tensor> cells;
  std::vector<uint8_t> filled;
  Tensor zero_state;

  const Tensor& at(size_t r, size_t c) const;
  void set(size_t r, size_t c, Tensor h);
};

// Mean of the four degree-s predecessors of flat cell t (row-major frame):
//   left (r, c-s), up-left (r-s, c-s), up (r-s, c), up-right (r-s, c+s),
// in that order. Off-grid references contribute the zero state but keep the
// 1/4 normalizer. `enabled` masks offsets out entirely (normalizer becomes
// the enabled count); the default keeps all four.
Tensor elc_aggregate_2d(const HiddenGrid& grid, size_t t, size_t s,
                        std::array<bool, 4> enabled = {true, true, true,
                                                       true});

}  // namespace elc
