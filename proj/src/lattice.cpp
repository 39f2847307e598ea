#include "elc/lattice.hpp"

#include "elc/error.hpp"
#include "elc/ops.hpp"

namespace elc {

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::SE:
      return "SE";
    case Direction::SW:
      return "SW";
    case Direction::NE:
      return "NE";
    case Direction::NW:
      return "NW";
  }
  return "?";
}

Direction direction_from_name(const std::string& name) {
  if (name == "SE") return Direction::SE;
  if (name == "SW") return Direction::SW;
  if (name == "NE") return Direction::NE;
  if (name == "NW") return Direction::NW;
  throw ConfigError("unknown direction '" + name + "'");
}

namespace {

void validate(const LatticeSpec& spec) {
  if (spec.height == 0 || spec.width == 0) {
    throw ContractError("lattice extents must be positive");
  }
  if (spec.stride == 0) throw ContractError("lattice stride must be >= 1");
}

// Original coordinates of frame position (fr, fc) for a direction.
std::pair<size_t, size_t> to_original(const LatticeSpec& spec, size_t fr,
                                      size_t fc) {
  const size_t h = spec.height, w = spec.width;
  switch (spec.direction) {
    case Direction::SE:
      return {fr, fc};
    case Direction::SW:
      return {fr, w - 1 - fc};
    case Direction::NE:
      return {h - 1 - fr, fc};
    case Direction::NW:
      return {h - 1 - fr, w - 1 - fc};
  }
  throw ContractError("bad direction");
}

}  // namespace

std::vector<std::pair<size_t, size_t>> unfold_order(const LatticeSpec& spec) {
  validate(spec);
  std::vector<std::pair<size_t, size_t>> order;
  order.reserve(spec.height * spec.width);
  for (size_t fr = 0; fr < spec.height; ++fr) {
    for (size_t fc = 0; fc < spec.width; ++fc) {
      order.push_back(to_original(spec, fr, fc));
    }
  }
  return order;
}

std::array<std::optional<size_t>, 4> degree_neighbors(
    size_t t, const LatticeSpec& spec) {
  validate(spec);
  const size_t w = spec.width;
  if (t >= spec.height * w) {
    throw ContractError("degree_neighbors: flat index " + std::to_string(t) +
                        " outside grid");
  }
  const long r = static_cast<long>(t / w);
  const long c = static_cast<long>(t % w);
  const long s = static_cast<long>(spec.stride);
  // Flat offsets t-s, t-w*s-s, t-w*s, t-w*s+s, evaluated in coordinates so a
  // horizontal offset cannot wrap into the previous row.
  const std::array<std::pair<long, long>, 4> coords = {
      std::pair<long, long>{r, c - s},
      {r - s, c - s},
      {r - s, c},
      {r - s, c + s}};
  std::array<std::optional<size_t>, 4> out;
  for (size_t i = 0; i < 4; ++i) {
    const auto [rr, cc] = coords[i];
    if (rr >= 0 && cc >= 0 && rr < static_cast<long>(spec.height) &&
        cc < static_cast<long>(w)) {
      out[i] = static_cast<size_t>(rr) * w + static_cast<size_t>(cc);
    }
  }
  return out;
}

HiddenGrid sweep(const Tensor& features, const GruParams& params,
                 const LatticeSpec& spec, SweepMode mode,
                 std::array<bool, 4> enabled) {
  if (features.ndim() != 4) {
    throw DimensionError("sweep: features must be [B,h,w,C], got " +
                         shape_to_string(features.shape()));
  }
  if (features.extent(1) != spec.height || features.extent(2) != spec.width) {
    throw DimensionError(
        "sweep: feature grid " + shape_to_string(features.shape()) +
        " does not match lattice " + std::to_string(spec.height) + "x" +
        std::to_string(spec.width));
  }
  return sweep_cells(split_grid_cells(features), params, spec, mode, enabled);
}

HiddenGrid sweep_cells(const std::vector<Tensor>& feature_cells,
                       const GruParams& params, const LatticeSpec& spec,
                       SweepMode mode, std::array<bool, 4> enabled) {
  validate(spec);
  const size_t h = spec.height, w = spec.width;
  if (feature_cells.size() != h * w) {
    throw DimensionError("sweep: " + std::to_string(feature_cells.size()) +
                         " feature cells for a " + std::to_string(h) + "x" +
                         std::to_string(w) + " lattice");
  }
  const size_t batch = feature_cells[0].extent(0);
  const size_t hid = params.b_r.extent(0);
  const auto order = unfold_order(spec);

  HiddenGrid work(h, w, batch, hid);
  for (size_t i = 0; i < order.size(); ++i) {
    const auto [r, c] = order[i];
    const Tensor& x = feature_cells[r * w + c];
    Tensor h_t;
    if (mode == SweepMode::PlainGru) {
      const Tensor& prev = i == 0 ? work.zero_state : work.cells[i - 1];
      h_t = gru_step(params, x, prev);
    } else {
      Tensor agg = elc_aggregate_2d(work, i, spec.stride, enabled);
      h_t = gru_elc_step(params, x, agg);
    }
    work.set(i / w, i % w, std::move(h_t));
  }

  // Back to original coordinates.
  HiddenGrid out(h, w, batch, hid);
  for (size_t i = 0; i < order.size(); ++i) {
    const auto [r, c] = order[i];
    out.set(r, c, work.cells[i]);
  }
  return out;
}

}  // namespace elc
