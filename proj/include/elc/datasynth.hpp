#pragma once

#include <span>
#include <string>
#include <vector>

#include "elc/random.hpp"
#include "elc/tensor.hpp"

namespace elc {

// One training sample: an [H, W, C] image and a per-pixel class id.
// ignore_label pixels are excluded from losses and metrics.
struct LabeledGrid {
  Tensor image;
  std::vector<int> labels;

  static constexpr int kIgnore = -1;

  size_t height() const { return image.extent(0); }
  size_t width() const { return image.extent(1); }
  size_t channels() const { return image.extent(2); }
};

enum class SynthKind { BeaconParity, RegionFill };

const char* synth_kind_name(SynthKind k);
SynthKind synth_kind_from_name(const std::string& name);

// Synthetic tasks whose labels require context up to `dependency` pixels
// away, so that long-range conditioning has something to earn.
struct SynthTaskSpec {
  size_t height = 32;
  size_t width = 32;
  size_t dependency = 8;  // D, pixels
  size_t num_classes = 2;
  double noise = 0.0;  // additive Gaussian stddev before quantization
  uint64_t seed = 1;
  SynthKind kind = SynthKind::BeaconParity;
  size_t count = 1;
  double beacon_density = 0.08;  // beacon-parity: per-pixel beacon rate
  size_t region_count = 5;       // region-fill: rectangles per sample

  void validate() const;
};

// ---- beacon-parity ----------------------------------------------------
// Sparse "beacon" pixels carry a class in their channels; every pixel is
// labeled by the nearest beacon within `dependency` steps along its row or
// column (scanning distance 0,1,..,D, at each distance left, right, up,
// down). Pixels with no beacon in range get class 0. Background appearance
// is independent of the label, so only context can solve the task.

// Label field from an explicit beacon map (entry -1 = no beacon, otherwise
// the beacon's class). Exposed so tests can re-derive labels from images.
std::vector<int> beacon_parity_labels(size_t height, size_t width,
                                      std::span<const int> beacon_class,
                                      size_t dependency);

std::vector<LabeledGrid> gen_beacon_parity(const SynthTaskSpec& spec);

// ---- region-fill --------------------------------------------------------
// Random rectangles drawn in z-order. A rectangle's border pixels carry its
// class; its interior pixels only mark region membership, so the class of an
// interior pixel is only visible on the border it belongs to.

struct RectSpec {
  size_t row0 = 0, col0 = 0;
  size_t rect_height = 0, rect_width = 0;
  int cls = 1;
};

// Renders rectangles in z-order (later ones on top). No noise, no retries;
// building block for gen_region_fill and for tests. num_classes fixes the
// class encoding in the border channel.
LabeledGrid render_region_sample(size_t height, size_t width,
                                 std::span<const RectSpec> rects,
                                 size_t num_classes);

std::vector<LabeledGrid> gen_region_fill(const SynthTaskSpec& spec);

std::vector<LabeledGrid> generate_dataset(const SynthTaskSpec& spec);

// Pixel values are kept on the 1/255 grid so netpbm round trips are
// bit-exact.
double quantize_unit(double v);

// ---- netpbm persistence -------------------------------------------------
// Images are binary PPM (P6, maxval 255); labels binary PGM (P5) with gray
// value = class id and 255 = ignore.

void write_netpbm_pair(const LabeledGrid& grid, const std::string& image_path,
                       const std::string& label_path);
LabeledGrid load_netpbm_pair(const std::string& image_path,
                             const std::string& label_path,
                             size_t num_classes);

// Pairs matched by basename: image_dir/x.ppm with label_dir/x.pgm.
std::vector<LabeledGrid> load_pairs(const std::string& image_dir,
                                    const std::string& label_dir,
                                    size_t num_classes);

// Writes dir/images/*.ppm, dir/labels/*.pgm and dir/manifest.tsv
// (one "image_path<TAB>label_path" line per pair).
void write_dataset(const std::vector<LabeledGrid>& dataset,
                   const std::string& dir);
std::vector<LabeledGrid> load_manifest(const std::string& manifest_path,
                                       size_t num_classes);

}  // namespace elc
