#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "twsbench/calendar.hpp"

namespace twsbench {

inline constexpr std::size_t kDynamicChannels = 4;
inline constexpr std::size_t kStaticFeatures = 11;

inline constexpr std::array<std::string_view, kDynamicChannels> kDynamicNames = {
    "precip", "temp", "lai", "ssmc"};
inline constexpr std::array<std::string_view, kStaticFeatures> kStaticNames = {
    "elev", "slope", "sand", "silt", "clay", "forest", "crop",
    "area", "clim_precip", "clim_temp", "clim_lai"};
inline constexpr std::string_view kTargetName = "tws";

// Index of the first climatology static (clim_precip); the three climatologies are contiguous.
inline constexpr std::size_t kClimatologyOffset = 8;

using StaticVector = std::array<double, kStaticFeatures>;

/// One basin's aligned record. Immutable after construction; share by const reference.
///
/// `dynamic` is length x 4 (precip mm/step, temp K, LAI, SSMC m3/m3) and `target`
/// holds TWS in mm water equivalent.
struct BasinSeries {
  std::string basin_id;
  TimeAxis axis;
  Eigen::MatrixXd dynamic;
  Eigen::VectorXd target;
  StaticVector statics{};

  std::size_t length() const { return axis.length(); }
  // Throws on any shape mismatch or non-finite value.
  void validate() const;
};

struct DateRange {
  Date start;
  Date end;  // inclusive
};

enum class Split { Train, Validation, Test };
std::string_view to_string(Split s);

struct SplitSpec {
  DateRange train;
  std::optional<DateRange> validation;
  DateRange test;

  void validate() const;

  // 2003-2015 train, 2016-2020 test.
  static SplitSpec linear_default();
  // 2003-2012 train, 2013-2015 validation, 2016-2020 test.
  static SplitSpec neural_default();
};

/// Contiguous window [begin, begin + size) of a series.
struct SeriesView {
  const BasinSeries* series = nullptr;
  std::size_t begin = 0;
  std::size_t size = 0;

  Date first_date() const { return series->axis.date_at(begin); }
  Date last_date() const { return series->axis.date_at(begin + size - 1); }
  // Rows of the view as a size x 5 block: four dynamics then the target.
  Eigen::MatrixXd channels() const;
};

struct SplitViews {
  SeriesView train;
  std::optional<SeriesView> validation;
  SeriesView test;
};

SplitViews split_series(const BasinSeries& series, const SplitSpec& spec);

/// Per-column standardization; std is floored so constant columns map to zero.
class Scaler {
 public:
  static constexpr double kStdFloor = 1e-8;

  Scaler() = default;
  Scaler(Eigen::VectorXd mean, Eigen::VectorXd std);

  // Population statistics over the rows of `data` (rows >= 2).
  static Scaler fit(const Eigen::MatrixXd& data);

  std::size_t size() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& std() const { return std_; }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& data) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& data) const;
  double transform(double value, std::size_t column) const {
    return (value - mean_[static_cast<Eigen::Index>(column)]) / std_[static_cast<Eigen::Index>(column)];
  }
  double inverse(double value, std::size_t column) const {
    return value * std_[static_cast<Eigen::Index>(column)] + mean_[static_cast<Eigen::Index>(column)];
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd std_;
};

// Scaler over the four dynamics plus the target (column 4), fit on training rows only.
Scaler fit_scaler(const SeriesView& train_view);

// ---- CSV ingestion -------------------------------------------------------

struct Violation {
  std::string kind;  // matches ErrorKind names: schema, missing-value, gap, orphan-basin
  std::string message;
};

/// Loads one BasinSeries per basin, sorted by basin_id. Throws Error on the first
/// problem found; use validate_dataset_files to collect all of them.
std::vector<BasinSeries> load_basin_series(const std::string& dynamic_path,
                                           const std::string& static_path);

std::vector<Violation> validate_dataset_files(const std::string& dynamic_path,
                                              const std::string& static_path);

// Shortest round-trip decimal formatting; reloads bit-identically.
void write_basin_series(const std::vector<BasinSeries>& series, const std::string& dynamic_path,
                        const std::string& static_path);

std::string format_double(double v);

}  // namespace twsbench
