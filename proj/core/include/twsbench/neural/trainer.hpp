#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "twsbench/neural/batch.hpp"
#include "twsbench/neural/loss.hpp"
#include "twsbench/neural/models.hpp"

namespace twsbench::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  int max_epochs = 50;
  double min_delta = 1e-4;
  int patience = 10;
  std::vector<double> quantiles{0.5};
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainHooks {
  // Replaces the computed validation loss of an epoch when it returns a value.
  std::function<std::optional<double>(int epoch, double computed)> val_loss_override;
  std::function<void(const EpochRecord&, const NeuralModel&)> on_epoch_end;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  bool early_stopped = false;
  int epochs_run() const { return static_cast<int>(history.size()); }
};

/// Reported loss: twice the mean pinball over examples, leads and quantiles (the MAE of the
/// standardized target when only the median is fitted).
double scaled_quantile_loss(const NeuralModel& model, const BatchSource& source, const QuantileLoss& loss,
                            std::size_t chunk = 256);

/// Adam on shuffled mini-batches. Early stopping counts epochs since the last improvement of at
/// least min_delta and stops after `patience` of them; the parameters of the epoch with the
/// lowest validation loss (earliest on ties) are restored before returning.
TrainResult train(NeuralModel& model, const BatchSource& train_set, const BatchSource& validation,
                  const TrainConfig& config, const TrainHooks& hooks = {});

struct TrainedNeural {
  std::unique_ptr<NeuralModel> model;
  TrainResult result;
};

// make_model + initialize(config.seed) + train.
TrainedNeural fit_neural(const NeuralConfig& model_config, const TrainConfig& config, const BatchSource& train_set,
                         const BatchSource& validation, const TrainHooks& hooks = {});

// Row of the point forecast (median, else the middle quantile) for lead h (1-based).
Eigen::Index point_row(const std::vector<double>& quantiles, int lead);

}  // namespace twsbench::nn
