#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elc/datasynth.hpp"
#include "elc/lattice.hpp"

namespace elc {

struct EncoderStage {
  size_t channels = 16;
  bool pool = false;
};

enum class BlockKind { GruElc, PlainGru };

// Pixel-labeling model: small convolutional encoder, a recurrent block over
// the feature grid (either degree-1..S GRU sweeps in four directions with
// long-range conditioning, or four plain GRU sweeps), channel concatenation,
// and an upsampling prediction head back to input resolution.
struct SegModelConfig {
  size_t in_channels = 3;
  std::vector<EncoderStage> encoder{{16, true}, {32, false}};
  size_t hidden_width = 32;  // channels per GRU unit
  size_t scales = 2;         // S: degrees 1..S (GruElc block only)
  size_t num_classes = 2;
  // One (upsample, 3x3 conv, relu) stage per pooled level; widths here.
  std::vector<size_t> head_channels{16};
  bool include_encoder_features = true;
  BlockKind block = BlockKind::GruElc;
  double weight_stddev = 0.1;  // recurrent-unit init

  void validate() const;
  size_t pool_count() const;
  size_t encoder_out_channels() const;
  size_t block_unit_count() const;  // 4*S for GruElc, 4 for PlainGru
  size_t concat_channels() const;
};

struct ConvLayer {
  Tensor weight;  // [k*k*in, out]
  Tensor bias;    // [out]
  size_t in_ch = 0, out_ch = 0, ksize = 3;
};

struct SegModel {
  SegModelConfig cfg;
  std::vector<ConvLayer> encoder;
  // Unit order: scale ascending, direction SE, SW, NE, NW within a scale.
  std::vector<GruParams> units;
  std::vector<ConvLayer> head;
  ConvLayer classifier;  // 1x1 to num_classes logits

  std::vector<std::pair<std::string, Tensor>> named_params() const;
  size_t param_count() const;
  size_t block_param_count() const;  // recurrent units only
};

SegModel build_model(const SegModelConfig& cfg, Rng& rng);

// images: [B, H, W, in_channels] with H, W divisible by 2^pool_count.
// Returns per-pixel logits [B, H, W, num_classes].
Tensor seg_forward(const SegModel& model, const Tensor& images);

// Plain-GRU width whose 4-unit block best matches the parameter count of a
// 4*S-unit block of width `hidden_width` on the same input channels.
size_t matched_plain_width(size_t in_channels, size_t scales,
                           size_t hidden_width);

// ---- loss and schedule ----------------------------------------------

// weight_c = median(freq) / freq_c over classes with nonzero counts;
// zero-count classes get weight 0.
std::vector<double> median_frequency_weights(
    const std::vector<size_t>& histogram);

double poly_lr(size_t epoch, size_t epochs, double base_lr, double power);

// One Adam step with bias correction; `step` starts at 1.
void adam_update(std::span<double> param, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, double lr,
                 double beta1, double beta2, double eps, size_t step);

struct TrainConfig {
  size_t epochs = 25;
  double base_lr = 0.001;
  double poly_power = 0.9;
  size_t batch_size = 8;
  bool median_balancing = false;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 1;
  bool flip = false;     // horizontal flip, p = 0.5
  size_t crop = 0;       // random crop side; 0 = off
  double jitter = 0.0;   // additive Gaussian image noise stddev; 0 = off

  void validate() const;
};

// ---- evaluation --------------------------------------------------------

struct EvalReport {
  std::vector<std::vector<size_t>> confusion;  // [truth][prediction]
  double global = 0.0;
  std::vector<double> per_class;  // NaN for classes with no ground truth
  double class_avg = 0.0;
  size_t counted = 0;
};

EvalReport report_from_confusion(
    const std::vector<std::vector<size_t>>& confusion);
EvalReport evaluate(const SegModel& model,
                    const std::vector<LabeledGrid>& dataset,
                    size_t batch_size = 8);
// Global/Class percentages at 1 decimal plus the per-class table.
std::string eval_report_text(const EvalReport& report);

// ---- training ------------------------------------------------------------

struct EpochMetrics {
  size_t epoch = 0;
  double loss = 0.0;
  double global = 0.0;
  double class_avg = 0.0;
  double lr = 0.0;
};

// Minibatch Adam on weighted cross entropy with the poly schedule.
// Deterministic under (seed, config, dataset). `on_epoch` runs after each
// epoch (checkpointing hook).
std::vector<EpochMetrics> train(
    SegModel& model, const std::vector<LabeledGrid>& train_set,
    const std::vector<LabeledGrid>& val_set, const TrainConfig& cfg,
    const std::function<void(size_t, const SegModel&,
                             const EpochMetrics&)>& on_epoch = nullptr);

// CSV: epoch,loss,global,class_avg,lr
std::string metrics_csv(const std::vector<EpochMetrics>& rows);

// Label histogram over a dataset (ignore pixels excluded).
std::vector<size_t> label_histogram(const std::vector<LabeledGrid>& dataset,
                                    size_t num_classes);

}  // namespace elc
