#include "elc/elc_cells.hpp"

#include "elc/error.hpp"
#include "elc/ops.hpp"

namespace elc {

const CellState& HiddenHistory::at_time(size_t t) const {
  if (t < 1 || t > states_.size()) {
    throw ContractError("HiddenHistory: step " + std::to_string(t) +
                        " not recorded yet (length " +
                        std::to_string(states_.size()) + ")");
  }
  return states_[t - 1];
}

namespace {

// Shared 1-D aggregation; `cell` selects the LSTM cell-state component.
Tensor aggregate_1d(const HiddenHistory& history, size_t t,
                    const ElcSpec& spec, bool cell) {
  if (t < 2) {
    throw ContractError("elc_aggregate: t must be >= 2, got " +
                        std::to_string(t));
  }
  if (spec.stride < 1 || spec.scale < 1) {
    throw ContractError("elc_aggregate: stride and scale must be >= 1");
  }
  auto component = [&](size_t step) -> const Tensor& {
    const CellState& s = history.at_time(step);
    return cell ? s.c : s.h;
  };
  // h_{t-1} is always in range for t >= 2; it also fixes the state shape
  // for the zero used by out-of-range references.
  Tensor acc = component(t - 1);
  Tensor zero;
  for (size_t i = 1; i <= spec.scale; ++i) {
    const long ref = static_cast<long>(t) - static_cast<long>(i * spec.stride);
    if (history.in_range(ref)) {
      acc = add(acc, component(static_cast<size_t>(ref)));
    } else {
      if (!zero.defined()) zero = Tensor::zeros(acc.shape());
      acc = add(acc, zero);
    }
  }
  return scale(acc, 1.0 / static_cast<double>(spec.scale + 1));
}

}  // namespace

Tensor elc_aggregate(const HiddenHistory& history, size_t t,
                     const ElcSpec& spec) {
  return aggregate_1d(history, t, spec, /*cell=*/false);
}

Tensor elc_aggregate_cell(const HiddenHistory& history, size_t t,
                          const ElcSpec& spec) {
  const CellState& probe = history.at_time(t >= 2 ? t - 1 : 1);
  if (!probe.c.defined()) {
    throw ContractError("elc_aggregate_cell: history has no cell states");
  }
  return aggregate_1d(history, t, spec, /*cell=*/true);
}

std::pair<Tensor, Tensor> rnn_elc_step(const VanillaRnnParams& p,
                                       const Tensor& x,
                                       const HiddenHistory& history, size_t t,
                                       const ElcSpec& spec) {
  return vanilla_rnn_step(p, x, elc_aggregate(history, t, spec));
}

Tensor gru_elc_step(const GruParams& p, const Tensor& x, const Tensor& H) {
  // The aggregate substitutes for the previous hidden state everywhere,
  // so the step function itself is unchanged (and so is the weight count).
  return gru_step(p, x, H);
}

CellState lstm_elc_step(const LstmParams& p, const Tensor& x,
                        const Tensor& H_h, const Tensor& H_c) {
  return lstm_step(p, x, CellState{H_h, H_c});
}

HiddenGrid::HiddenGrid(size_t height_, size_t width_, size_t batch_,
                       size_t state_width_)
    : height(height_),
      width(width_),
      batch(batch_),
      state_width(state_width_),
      cells(height_ * width_),
      filled(height_ * width_, 0),
      zero_state(Tensor::zeros({batch_, state_width_})) {}

const Tensor& HiddenGrid::at(size_t r, size_t c) const {
  if (r >= height || c >= width) {
    throw ContractError("HiddenGrid::at: position out of range");
  }
  if (!filled[r * width + c]) {
    throw ContractError("HiddenGrid::at: cell not filled");
  }
  return cells[r * width + c];
}

void HiddenGrid::set(size_t r, size_t c, Tensor h) {
  cells[r * width + c] = std::move(h);
  filled[r * width + c] = 1;
}

Tensor elc_aggregate_2d(const HiddenGrid& grid, size_t t, size_t s,
                        std::array<bool, 4> enabled) {
  const size_t w = grid.width;
  if (t >= grid.height * grid.width) {
    throw ContractError("elc_aggregate_2d: flat index " + std::to_string(t) +
                        " outside " + std::to_string(grid.height) + "x" +
                        std::to_string(w) + " grid");
  }
  if (s < 1) throw ContractError("elc_aggregate_2d: stride must be >= 1");
  const long r = static_cast<long>(t / w);
  const long c = static_cast<long>(t % w);
  const long d = static_cast<long>(s);
  // Offsets in the order t-s, t-w*s-s, t-w*s, t-w*s+s; the coordinate form
  // rejects the silent row wrap of the flat formulas.
  const std::array<std::pair<long, long>, 4> offsets = {
      std::pair<long, long>{r, c - d},
      {r - d, c - d},
      {r - d, c},
      {r - d, c + d}};
  size_t normalizer = 0;
  Tensor acc;
  for (size_t i = 0; i < 4; ++i) {
    if (!enabled[i]) continue;
    ++normalizer;
    const auto [rr, cc] = offsets[i];
    const bool in_grid = rr >= 0 && cc >= 0 &&
                         rr < static_cast<long>(grid.height) &&
                         cc < static_cast<long>(w);
    const Tensor& term =
        in_grid ? grid.at(static_cast<size_t>(rr), static_cast<size_t>(cc))
                : grid.zero_state;
    acc = acc.defined() ? add(acc, term) : term;
  }
  if (normalizer == 0) {
    throw ContractError("elc_aggregate_2d: all neighbor offsets disabled");
  }
  return scale(acc, 1.0 / static_cast<double>(normalizer));
}

}  // namespace elc
