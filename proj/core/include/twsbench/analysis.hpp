#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twsbench/linear.hpp"
#include "twsbench/metrics.hpp"
#include "twsbench/stats.hpp"

namespace twsbench {

struct FeatureCoefficients {
  std::string feature;
  DistributionSummary per_basin;  // boxplot of Linear_single weights
  std::vector<double> values;     // basin order of the input map
  double global_weight = 0.0;

  bool global_inside_iqr() const { return global_weight >= per_basin.q1 && global_weight <= per_basin.q3; }
};

std::vector<FeatureCoefficients> coefficient_distribution(const std::map<std::string, LinearModel>& per_basin,
                                                          const LinearModel& global);

// basin id -> model name -> metrics
using MetricTable = std::map<std::string, std::map<std::string, MetricSet>>;

struct BasinRanking {
  std::string basin_id;
  std::vector<std::string> order;  // best first
  std::string best() const { return order.empty() ? std::string() : order[0]; }
  std::string second() const { return order.size() < 2 ? std::string() : order[1]; }
};

/// Per-basin ordering by `metric`: better values first (descending for skill scores,
/// ascending for error metrics), undefined values last, ties alphabetical by model name.
/// Every basin must carry every model appearing anywhere in the table.
std::vector<BasinRanking> rank_models(const MetricTable& table, const std::string& metric = "nse");

// Number of basins where each model ranks first / second.
std::map<std::string, std::pair<std::size_t, std::size_t>> best_counts(const std::vector<BasinRanking>& ranks);

}  // namespace twsbench
