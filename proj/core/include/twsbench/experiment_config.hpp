#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twsbench/neural/parameters.hpp"
#include "twsbench/synthetic.hpp"

namespace twsbench {

enum class ExperimentKind { RegressionTournament, SeqLenSweep, ForecastSweep, DailySmoothed, TimeIndexAblation, TreeBaselines };
enum class Variant { OlLike, DaLike, Real };
enum class Profile { Desk, Paper };

std::string_view to_string(ExperimentKind k);
std::string_view to_string(Variant v);
std::string_view to_string(Profile p);
ExperimentKind parse_experiment_kind(std::string_view s);
Variant parse_variant(std::string_view s);
Profile parse_profile(std::string_view s);

// Canonical model names.
inline constexpr std::string_view kLinearSingle = "Linear_single";
inline constexpr std::string_view kLinearGlob = "Linear_glob";
inline constexpr std::string_view kLstm = "LSTM";
inline constexpr std::string_view kTft = "TFT";
inline constexpr std::string_view kTftNoTime = "TFT_no_timeidx";
inline constexpr std::string_view kRandomForest = "RF";
inline constexpr std::string_view kBoosted = "Boosted";

// Canonical name for a user-supplied model name ("TFT-lite" -> "TFT"); throws on unknown names.
std::string canonical_model_name(std::string_view name);
bool is_neural_model(std::string_view canonical);

/// Optional per-field overrides of the profile's neural hyperparameters.
struct NeuralOverrides {
  std::optional<long> hidden, heads;
  std::optional<double> learning_rate, dropout;
  std::optional<nn::InitScheme> init;
  std::optional<int> max_epochs, patience;
  std::optional<std::size_t> batch_size;
  std::optional<double> min_delta;
};

/// Fully resolved neural hyperparameters for one architecture.
struct NeuralSettings {
  long hidden = 32;
  long heads = 4;
  double learning_rate = 1e-3;
  double dropout = 0.0;
  nn::InitScheme init = nn::InitScheme::Xavier;
  int max_epochs = 50;
  int patience = 10;
  double min_delta = 1e-4;
  std::size_t batch_size = 256;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::RegressionTournament;
  Variant variant = Variant::OlLike;
  Profile profile = Profile::Desk;
  std::vector<std::string> models;  // empty: the experiment's default list
  std::optional<int> sequence_length;  // default 12, or 365 for daily_smoothed
  std::vector<int> sequence_lengths{6, 9, 12, 15, 18};
  int horizon = 6;
  int smoothing_window = 30;
  int daily_stride = 5;
  std::vector<double> quantiles{0.5};
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  std::string output_dir;

  // Data source: either both CSV paths, or a synthetic config (variant preset plus overrides).
  std::string dynamic_path, static_path;
  std::optional<SyntheticConfig> synthetic;

  NeuralOverrides neural;
  double tree_holdout_fraction = 0.2;

  // Applies the experiment's default model list and checks kind-specific requirements.
  void validate() const;
  std::vector<std::string> resolved_models() const;
  int effective_sequence_length() const;
  bool uses_files() const { return !dynamic_path.empty() || !static_path.empty(); }
  // Synthetic generator settings implied by variant, profile, seed and overrides.
  SyntheticConfig resolved_synthetic() const;
  NeuralSettings neural_settings(std::string_view canonical_model) const;
};

// Unknown keys are rejected. Keys: experiment, variant, profile, models, seq_len, seq_lens,
// horizon, smoothing_window, daily_stride, quantiles, seed, workers, out, data{dynamic, static,
// synthetic{...}}, neural{...}, trees{holdout_fraction}.
ExperimentConfig experiment_config_from_json(std::string_view json_text);
// Applies a JSON object of the same schema on top of `base`.
ExperimentConfig merge_experiment_config(const ExperimentConfig& base, std::string_view json_text);
// Canonical JSON. Run-environment fields (workers, out) are omitted when `for_manifest`.
std::string experiment_config_to_json(const ExperimentConfig& config, bool for_manifest = false);

}  // namespace twsbench
