#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twsbench/dataset.hpp"

namespace twsbench {

enum class TaskKind { Regression, Forecast, DailySmoothed };
std::string_view to_string(TaskKind k);

struct TaskSpec {
  TaskKind kind = TaskKind::Regression;
  int sequence_length = 12;
  int horizon = 1;            // Forecast only
  int smoothing_window = 30;  // DailySmoothed only
  int daily_stride = 5;       // DailySmoothed only

  int n_targets() const { return kind == TaskKind::Forecast ? horizon : 1; }
  void validate(Resolution resolution) const;

  static TaskSpec regression(int sequence_length = 12);
  static TaskSpec forecast(int sequence_length, int horizon);
  static TaskSpec daily_smoothed(int sequence_length = 365, int window = 30, int stride = 5);
};

inline constexpr std::size_t kMonthDummies = 11;
inline constexpr std::size_t kSequenceChannels = kDynamicChannels + kMonthDummies + 1;

// 4L lagged values for steps t-L .. t-1, channel-major, oldest first.
std::vector<double> build_lag_window(const BasinSeries& series, std::size_t t, int sequence_length);

// One-hot over months 2..12; January is the all-zero reference month.
std::array<double, kMonthDummies> month_dummies(unsigned month);

// Steps elapsed since `epoch` at the given resolution.
std::int64_t trend_index(const Date& d, const Date& epoch, Resolution resolution);

struct SmoothedTarget {
  std::size_t first = 0;  // index of the first emitted value in the raw series
  std::vector<double> values;
};

// Trailing mean over t-k+1 .. t, emitted only where the full window exists.
SmoothedTarget smooth_target(std::span<const double> raw, int window);

enum class ClimatologyMode { AnnualMean, TargetMonth };

struct PrepareOptions {
  SplitSpec split = SplitSpec::linear_default();
  // Validation/test windows may reach back into earlier splits (never forward).
  bool allow_prior_split_history = true;
  ClimatologyMode climatology = ClimatologyMode::AnnualMean;
};

/// A basin's series after standardization with training-period statistics.
struct PreparedBasin {
  std::string basin_id;
  TimeAxis axis;
  Scaler scaler;                  // columns: precip, temp, lai, ssmc, tws
  Eigen::MatrixXd dynamic;        // standardized, T x 4
  Eigen::VectorXd target_raw;     // physical units
  std::vector<unsigned> month;
  std::vector<std::int64_t> time_index;
  std::vector<double> trend;      // standardized time index
  std::vector<std::optional<Split>> split;
  Eigen::VectorXd statics;        // standardized across basins
  Eigen::MatrixXd monthly_climatology;  // 12 x 3 standardized, TargetMonth mode only
};

struct PreparedData {
  PrepareOptions options;
  Resolution resolution = Resolution::Monthly;
  Date epoch;
  Scaler static_scaler;
  double trend_mean = 0.0;
  double trend_std = 1.0;
  std::vector<PreparedBasin> basins;
};

std::shared_ptr<const PreparedData> prepare_basins(const std::vector<BasinSeries>& series,
                                                   const PrepareOptions& options);

struct ExampleRef {
  std::uint32_t basin = 0;
  std::uint32_t t = 0;  // first target step
  Split split = Split::Train;
};

struct SupervisedExample {
  std::string basin_id;
  std::size_t target_time = 0;
  Eigen::VectorXd flat_features;
  Eigen::MatrixXd sequence_features;  // L x 16
  Eigen::VectorXd static_features;
  std::int64_t time_index = 0;
  Eigen::VectorXd targets;            // standardized, H values
  Split split = Split::Train;
};

struct DesignMatrix {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<ExampleRef> refs;
};

/// Windowed examples for one task over prepared basins. Examples are materialized on demand.
class SupervisedSet {
 public:
  SupervisedSet(std::shared_ptr<const PreparedData> data, TaskSpec task, std::vector<ExampleRef> examples,
                std::vector<Eigen::VectorXd> target_model, std::vector<Eigen::VectorXd> target_physical);

  const TaskSpec& task() const { return task_; }
  const PreparedData& data() const { return *data_; }
  std::shared_ptr<const PreparedData> data_ptr() const { return data_; }
  std::size_t basin_count() const { return data_->basins.size(); }
  const std::string& basin_id(std::size_t b) const { return data_->basins[b].basin_id; }

  const std::vector<ExampleRef>& examples() const { return examples_; }
  std::vector<ExampleRef> examples(Split s, std::optional<std::size_t> basin = std::nullopt) const;
  std::size_t count(Split s) const;

  const std::vector<std::string>& flat_feature_names() const { return flat_names_; }
  const std::vector<std::string>& sequence_channel_names() const { return sequence_names_; }
  std::size_t flat_width() const { return flat_names_.size(); }

  // Lag block then month dummies and trend of the target time for `lead` (1-based).
  Eigen::VectorXd flat_features(const ExampleRef& ref, int lead = 1) const;
  Eigen::MatrixXd sequence_features(const ExampleRef& ref) const;
  Eigen::VectorXd static_features(const ExampleRef& ref) const;
  // Standardized targets for leads 1..H.
  Eigen::VectorXd targets(const ExampleRef& ref) const;
  double target_physical(const ExampleRef& ref, int lead = 1) const;
  double to_physical(const ExampleRef& ref, double standardized) const;
  Date target_date(const ExampleRef& ref, int lead = 1) const;
  SupervisedExample materialize(const ExampleRef& ref) const;

  DesignMatrix design_matrix(Split s, std::optional<std::size_t> basin = std::nullopt, int lead = 1) const;

  std::map<std::string, std::string> provenance;

  // Feature manifest: ordered names, task, example counts per split.
  std::string manifest_json() const;

 private:
  std::shared_ptr<const PreparedData> data_;
  TaskSpec task_;
  std::vector<ExampleRef> examples_;
  std::vector<Eigen::VectorXd> target_model_;     // per basin, standardized (NaN where absent)
  std::vector<Eigen::VectorXd> target_physical_;  // per basin, physical units
  std::vector<std::string> flat_names_;
  std::vector<std::string> sequence_names_;
};

SupervisedSet assemble_supervised(std::shared_ptr<const PreparedData> data, const TaskSpec& task);

// Throws SplitLeakage if any example's inputs or targets violate the split rules.
void check_leakage(const SupervisedSet& set);

std::vector<std::string> flat_feature_names(int sequence_length);
std::vector<std::string> sequence_channel_names();

}  // namespace twsbench
