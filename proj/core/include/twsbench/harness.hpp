#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "twsbench/analysis.hpp"
#include "twsbench/experiment_config.hpp"
#include "twsbench/features.hpp"
#include "twsbench/grid_search.hpp"
#include "twsbench/linear.hpp"
#include "twsbench/neural/trainer.hpp"
#include "twsbench/report.hpp"

namespace twsbench {

/// Runs fn(0..n-1) on up to `workers` threads. Results must go to per-index slots. If jobs
/// throw, the exception of the lowest failing index is rethrown after all jobs finish.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Any fitted model, for prediction and introspection.
using TrainedModel = std::variant<LinearModel, ForestModel, BoostedModel, std::shared_ptr<const nn::NeuralModel>>;

struct BasinPrediction {
  std::string basin_id;
  std::vector<Date> dates;
  std::vector<double> truth;  // physical units
  std::vector<double> pred;
};

struct GridRecord {
  std::string basin_id;
  std::string model;
  std::size_t candidates = 0;
  std::string best_params;
  double holdout_mae = 0.0;
};

/// Test-period predictions of every requested model for one task.
struct ModelRun {
  std::vector<std::string> models;
  std::vector<std::string> basins;
  // [lead - 1][model][basin]
  std::vector<std::vector<std::vector<BasinPrediction>>> predictions;
  std::map<std::string, LinearModel> linear_single;  // lead 1
  std::optional<LinearModel> linear_glob;           // lead 1
  std::map<std::string, std::shared_ptr<const nn::NeuralModel>> neural;
  std::map<std::string, nn::TrainResult> histories;
  std::vector<GridRecord> grid;
  std::shared_ptr<const SupervisedSet> flat_set;    // lead-1 set on the linear split
  std::shared_ptr<const SupervisedSet> neural_set;  // on the neural split
  std::vector<std::string> feature_manifests;       // JSON documents, one per assembled set

  MetricTable metrics(int lead = 1) const;
};

/// Fits every model on its split and predicts the test period. `task` is the neural task; flat
/// models use the same task with a single target at each lead (direct multi-step).
ModelRun run_models(const ExperimentConfig& config, const std::vector<BasinSeries>& series, const TaskSpec& task,
                    const std::vector<std::string>& models);

struct ModelSummary {
  std::string setting;  // empty for single-setting experiments
  std::string model;
  std::optional<double> median_nse, median_kge;
};

struct ExperimentResult {
  Report report;
  std::vector<ModelSummary> summaries;
};

// Loads the configured files or generates the configured synthetic world.
std::vector<BasinSeries> load_experiment_data(const ExperimentConfig& config, std::string* input_hash = nullptr);

/// Validates the config, runs the experiment and assembles its complete report in memory.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<BasinSeries>& series,
                                const std::string& input_hash);

// Full-period trend class of a basin's target: "negative", "positive" (significant at 5%) or "none".
std::string trend_class(const BasinSeries& series);

}  // namespace twsbench
