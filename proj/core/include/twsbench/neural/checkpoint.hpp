#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "twsbench/neural/models.hpp"
#include "twsbench/neural/trainer.hpp"

namespace twsbench::nn {

// {"config": {...}, "tensors": {"<name>": {"shape": [r, c], "data": [column-major]}}}
std::string checkpoint_json(const NeuralModel& model);
std::unique_ptr<NeuralModel> model_from_checkpoint_json(const std::string& text);

void save_checkpoint(const NeuralModel& model, const std::filesystem::path& path);
std::unique_ptr<NeuralModel> load_checkpoint(const std::filesystem::path& path);

// epoch,train_loss,val_loss
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace twsbench::nn
