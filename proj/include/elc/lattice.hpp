#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "elc/elc_cells.hpp"

namespace elc {

// Unfolding direction of a 2D grid into a sequence. SE walks left-to-right,
// top-to-bottom; the others are its reflections in columns (SW), rows (NE),
// or both (NW).
enum class Direction { SE, SW, NE, NW };

const char* direction_name(Direction d);
Direction direction_from_name(const std::string& name);

struct LatticeSpec {
  size_t height = 0;
  size_t width = 0;
  Direction direction = Direction::SE;
  size_t stride = 1;  // degree s of the conditioned neighbors
};

// The order cells are visited: a permutation of all (row, col) positions in
// original coordinates. Element i of the result is frame-flat index i of the
// direction's own coordinate frame.
std::vector<std::pair<size_t, size_t>> unfold_order(const LatticeSpec& spec);

// The four degree-s predecessors of frame-flat index t, as frame-flat
// indices in the order t-s, t-w*s-s, t-w*s, t-w*s+s. Entries whose
// coordinates fall off the grid are absent; horizontal offsets never wrap
// across rows.
std::array<std::optional<size_t>, 4> degree_neighbors(size_t t,
                                                      const LatticeSpec& spec);

enum class SweepMode {
  GruElc,    // condition on the degree-s neighbor average
  PlainGru,  // condition on the sequence predecessor (traditional unit)
};

// Applies a GRU cell over every position of a feature grid [B, h, w, C] in
// unfold order, conditioning per `mode`, and returns the hidden grid in
// original coordinates. `enabled` masks neighbor offsets for GruElc mode.
HiddenGrid sweep(const Tensor& features, const GruParams& params,
                 const LatticeSpec& spec, SweepMode mode = SweepMode::GruElc,
                 std::array<bool, 4> enabled = {true, true, true, true});

// Same, over feature cells already split with split_grid_cells; lets several
// sweeps share one set of per-cell views.
HiddenGrid sweep_cells(const std::vector<Tensor>& feature_cells,
                       const GruParams& params, const LatticeSpec& spec,
                       SweepMode mode = SweepMode::GruElc,
                       std::array<bool, 4> enabled = {true, true, true, true});

}  // namespace elc
