#pragma once

#include <string>
#include <vector>

#include "elc/elc_cells.hpp"

namespace elc {

enum class CellFamily { Rnn, Lstm, Gru, RnnElc, LstmElc, GruElc1d };

const char* family_name(CellFamily f);
CellFamily family_from_name(const std::string& name);
bool family_is_elc(CellFamily f);
// The classic cell an ELC family is built from (identity for plain ones).
CellFamily base_family(CellFamily f);

// Configuration of the perturbation experiment: feed a T-step sequence of
// [M x N] uniform inputs through a freshly initialized cell, redraw only the
// first input, and measure how much each step's output moves.
struct ImpactConfig {
  CellFamily family = CellFamily::Gru;
  size_t sequence_length = 100;  // T
  size_t rows = 16;              // M
  size_t cols = 16;              // N
  ElcSpec elc{20, 1};            // used by the ELC families
  size_t trials = 20;
  uint64_t seed = 1;
  double weight_stddev = 0.1;
  double bias_value = 0.0;
  bool retain_trials = false;

  void validate() const;
};

// Mean-over-trials fluctuation per step; values[i] is F at step t = i+1.
struct FluctuationCurve {
  ImpactConfig config;
  std::vector<double> mean;
  std::vector<std::vector<double>> trial_curves;  // kept when retain_trials
};

// F = mean squared elementwise difference.
double fluctuation(const Tensor& y, const Tensor& y_hat);

// Parameters for one family; only the base family's record is populated.
struct FamilyParams {
  CellFamily family = CellFamily::Gru;
  VanillaRnnParams rnn;
  LstmParams lstm;
  GruParams gru;
};

FamilyParams init_family_params(CellFamily family, size_t in, size_t hidden,
                                size_t out, Rng& rng, double weight_stddev,
                                double bias_value);
size_t family_param_count(const FamilyParams& p);

// Per-step outputs of a sequence run from the zero state. The observed
// output is y for the vanilla families (identity output nonlinearity) and
// the hidden state for the gated families.
std::vector<Tensor> run_output_sequence(const FamilyParams& params,
                                        const std::vector<Tensor>& inputs,
                                        const ElcSpec& elc);

// One trial: draw params and inputs from trial_seed, perturb the first
// input, return F per step.
std::vector<double> run_impact_trial(const ImpactConfig& config,
                                     uint64_t trial_seed);

// Mean of `trials` trials, trial i seeded deterministically from
// (config.seed, i).
FluctuationCurve run_impact_experiment(const ImpactConfig& config);

// CSV with header t,mean_F,normalized_F[,trial_0..]; one row per step.
std::string impact_csv(const FluctuationCurve& curve);
// key=value sidecar echoing the config and the fixed conventions.
std::string impact_metadata(const FluctuationCurve& curve);
// Writes both files atomically (metadata at csv_path + ".meta").
void write_impact_outputs(const FluctuationCurve& curve,
                          const std::string& csv_path);

}  // namespace elc
