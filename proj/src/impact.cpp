#include "elc/impact.hpp"

#include "elc/error.hpp"
#include "elc/io_util.hpp"
#include "elc/ops.hpp"
#include "elc/sample.hpp"

namespace elc {

const char* family_name(CellFamily f) {
  switch (f) {
    case CellFamily::Rnn:
      return "rnn";
    case CellFamily::Lstm:
      return "lstm";
    case CellFamily::Gru:
      return "gru";
    case CellFamily::RnnElc:
      return "rnn-elc";
    case CellFamily::LstmElc:
      return "lstm-elc";
    case CellFamily::GruElc1d:
      return "gru-elc-1d";
  }
  return "?";
}

CellFamily family_from_name(const std::string& name) {
  for (CellFamily f :
       {CellFamily::Rnn, CellFamily::Lstm, CellFamily::Gru, CellFamily::RnnElc,
        CellFamily::LstmElc, CellFamily::GruElc1d}) {
    if (name == family_name(f)) return f;
  }
  throw ConfigError("unknown cell family '" + name + "'");
}

bool family_is_elc(CellFamily f) {
  return f == CellFamily::RnnElc || f == CellFamily::LstmElc ||
         f == CellFamily::GruElc1d;
}

CellFamily base_family(CellFamily f) {
  switch (f) {
    case CellFamily::RnnElc:
      return CellFamily::Rnn;
    case CellFamily::LstmElc:
      return CellFamily::Lstm;
    case CellFamily::GruElc1d:
      return CellFamily::Gru;
    default:
      return f;
  }
}

void ImpactConfig::validate() const {
  if (sequence_length < 2) {
    throw ContractError("impact: sequence length must be >= 2");
  }
  if (trials < 1) throw ContractError("impact: trials must be >= 1");
  if (rows < 1 || cols < 1) {
    throw ContractError("impact: input extents must be positive");
  }
  if (weight_stddev <= 0.0) {
    throw ContractError("impact: weight stddev must be > 0");
  }
  if (family_is_elc(family) && (elc.stride < 1 || elc.scale < 1)) {
    throw ContractError("impact: elc stride and scale must be >= 1");
  }
}

double fluctuation(const Tensor& y, const Tensor& y_hat) {
  if (y.shape() != y_hat.shape()) {
    throw DimensionError("fluctuation: shape mismatch " +
                         shape_to_string(y.shape()) + " vs " +
                         shape_to_string(y_hat.shape()));
  }
  double acc = 0.0;
  auto a = y.data();
  auto b = y_hat.data();
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

FamilyParams init_family_params(CellFamily family, size_t in, size_t hidden,
                                size_t out, Rng& rng, double weight_stddev,
                                double bias_value) {
  FamilyParams p;
  p.family = family;
  switch (base_family(family)) {
    case CellFamily::Rnn:
      p.rnn = init_vanilla_rnn(in, hidden, out, rng, weight_stddev, bias_value);
      break;
    case CellFamily::Lstm:
      p.lstm = init_lstm(in, hidden, rng, weight_stddev, bias_value);
      break;
    case CellFamily::Gru:
      p.gru = init_gru(in, hidden, rng, weight_stddev, bias_value);
      break;
    default:
      throw ContractError("init_family_params: bad base family");
  }
  return p;
}

size_t family_param_count(const FamilyParams& p) {
  switch (base_family(p.family)) {
    case CellFamily::Rnn:
      return param_count(p.rnn);
    case CellFamily::Lstm:
      return param_count(p.lstm);
    case CellFamily::Gru:
      return param_count(p.gru);
    default:
      return 0;
  }
}

std::vector<Tensor> run_output_sequence(const FamilyParams& params,
                                        const std::vector<Tensor>& inputs,
                                        const ElcSpec& elc) {
  if (inputs.empty()) {
    throw ContractError("run_output_sequence: empty input sequence");
  }
  const size_t rows = inputs[0].extent(0);
  const size_t hidden = [&] {
    switch (base_family(params.family)) {
      case CellFamily::Rnn:
        return params.rnn.b_h.extent(0);
      case CellFamily::Lstm:
        return params.lstm.b_i.extent(0);
      default:
        return params.gru.b_r.extent(0);
    }
  }();
  const Tensor zero = Tensor::zeros({rows, hidden});

  std::vector<Tensor> outputs;
  outputs.reserve(inputs.size());
  HiddenHistory history;
  CellState state{zero, zero};

  for (size_t step = 1; step <= inputs.size(); ++step) {
    const Tensor& x = inputs[step - 1];
    switch (params.family) {
      case CellFamily::Rnn: {
        auto [h, y] = vanilla_rnn_step(params.rnn, x, state.h);
        state.h = h;
        outputs.push_back(y);
        break;
      }
      case CellFamily::Lstm: {
        state = lstm_step(params.lstm, x, state);
        outputs.push_back(state.h);
        break;
      }
      case CellFamily::Gru: {
        state.h = gru_step(params.gru, x, state.h);
        outputs.push_back(state.h);
        break;
      }
      case CellFamily::RnnElc: {
        // Step 1 has an empty history; every reference is out of range, so
        // the aggregate is the zero state.
        auto [h, y] = step == 1
                          ? vanilla_rnn_step(params.rnn, x, zero)
                          : rnn_elc_step(params.rnn, x, history, step, elc);
        history.push(CellState{h, Tensor()});
        outputs.push_back(y);
        break;
      }
      case CellFamily::LstmElc: {
        Tensor H_h = step == 1 ? zero : elc_aggregate(history, step, elc);
        Tensor H_c = step == 1 ? zero : elc_aggregate_cell(history, step, elc);
        CellState s = lstm_elc_step(params.lstm, x, H_h, H_c);
        history.push(s);
        outputs.push_back(s.h);
        break;
      }
      case CellFamily::GruElc1d: {
        Tensor H = step == 1 ? zero : elc_aggregate(history, step, elc);
        Tensor h = gru_elc_step(params.gru, x, H);
        history.push(CellState{h, Tensor()});
        outputs.push_back(h);
        break;
      }
    }
  }
  return outputs;
}

std::vector<double> run_impact_trial(const ImpactConfig& config,
                                     uint64_t trial_seed) {
  config.validate();
  Rng param_rng(derive_seed(trial_seed, "params"));
  FamilyParams params =
      init_family_params(config.family, config.cols, config.cols, config.cols,
                         param_rng, config.weight_stddev, config.bias_value);

  // Each step's input has its own sub-seed so the perturbed sequence shares
  // x^2..x^T with the original exactly.
  std::vector<Tensor> X;
  X.reserve(config.sequence_length);
  for (size_t t = 1; t <= config.sequence_length; ++t) {
    Rng rng(derive_seed(trial_seed, "x", t));
    X.push_back(sample_uniform(rng, {config.rows, config.cols}, 0.0, 1.0));
  }
  std::vector<Tensor> X_hat = X;
  {
    Rng rng(derive_seed(trial_seed, "x-perturbed", 1));
    X_hat[0] = sample_uniform(rng, {config.rows, config.cols}, 0.0, 1.0);
  }

  std::vector<Tensor> Y = run_output_sequence(params, X, config.elc);
  std::vector<Tensor> Y_hat = run_output_sequence(params, X_hat, config.elc);

  std::vector<double> f(config.sequence_length);
  for (size_t i = 0; i < f.size(); ++i) f[i] = fluctuation(Y[i], Y_hat[i]);
  return f;
}

FluctuationCurve run_impact_experiment(const ImpactConfig& config) {
  config.validate();
  FluctuationCurve curve;
  curve.config = config;
  curve.mean.assign(config.sequence_length, 0.0);
  for (size_t i = 0; i < config.trials; ++i) {
    std::vector<double> f =
        run_impact_trial(config, derive_seed(config.seed, "trial", i));
    for (size_t t = 0; t < f.size(); ++t) curve.mean[t] += f[t];
    if (config.retain_trials) curve.trial_curves.push_back(std::move(f));
  }
  for (double& v : curve.mean) v /= static_cast<double>(config.trials);
  return curve;
}

std::string impact_csv(const FluctuationCurve& curve) {
  std::string out = "t,mean_F,normalized_F";
  if (curve.config.retain_trials) {
    for (size_t i = 0; i < curve.trial_curves.size(); ++i) {
      out += ",trial_" + std::to_string(i);
    }
  }
  out += "\n";
  const double f1 = curve.mean.empty() ? 0.0 : curve.mean[0];
  for (size_t t = 0; t < curve.mean.size(); ++t) {
    out += std::to_string(t + 1);
    out += ",";
    out += format_double(curve.mean[t]);
    out += ",";
    out += format_double(f1 != 0.0 ? curve.mean[t] / f1 : 0.0);
    if (curve.config.retain_trials) {
      for (const auto& trial : curve.trial_curves) {
        out += ",";
        out += format_double(trial[t]);
      }
    }
    out += "\n";
  }
  return out;
}

std::string impact_metadata(const FluctuationCurve& curve) {
  const ImpactConfig& c = curve.config;
  std::string out;
  out += std::string("family=") + family_name(c.family) + "\n";
  out += "T=" + std::to_string(c.sequence_length) + "\n";
  out += "M=" + std::to_string(c.rows) + "\n";
  out += "N=" + std::to_string(c.cols) + "\n";
  if (family_is_elc(c.family)) {
    out += "s=" + std::to_string(c.elc.stride) + "\n";
    out += "k=" + std::to_string(c.elc.scale) + "\n";
  }
  out += "trials=" + std::to_string(c.trials) + "\n";
  out += "seed=" + std::to_string(c.seed) + "\n";
  out += "weight_stddev=" + format_double(c.weight_stddev) + "\n";
  out += "bias_value=" + format_double(c.bias_value) + "\n";
  out += "retain_trials=" + std::string(c.retain_trials ? "true" : "false") +
         "\n";
  const bool vanilla = base_family(c.family) == CellFamily::Rnn;
  out += std::string("output_unit=") + (vanilla ? "y" : "h") + "\n";
  if (vanilla) out += "sigma_y=identity\n";
  out += "out_of_range_reference=zero-state, normalizer unchanged\n";
  return out;
}

void write_impact_outputs(const FluctuationCurve& curve,
                          const std::string& csv_path) {
  atomic_write_file(csv_path, impact_csv(curve));
  atomic_write_file(csv_path + ".meta", impact_metadata(curve));
}

}  // namespace elc
