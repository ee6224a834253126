#include "twsbench/analysis.hpp"

#include <algorithm>
#include <set>

#include "twsbench/errors.hpp"

namespace twsbench {

std::vector<FeatureCoefficients> coefficient_distribution(const std::map<std::string, LinearModel>& per_basin,
                                                          const LinearModel& global) {
  if (per_basin.empty()) fail(ErrorKind::EmptyInput, "no per-basin linear models");
  const auto& names = global.feature_names;
  if (static_cast<std::size_t>(global.weights.size()) != names.size())
    fail(ErrorKind::ManifestMismatch, "global model weights do not match its feature names");
  for (const auto& [id, m] : per_basin)
    if (m.feature_names != names)
      fail(ErrorKind::ManifestMismatch, "basin " + id + " was fitted on a different feature manifest");

  std::vector<FeatureCoefficients> out;
  for (std::size_t f = 0; f < names.size(); ++f) {
    FeatureCoefficients fc;
    fc.feature = names[f];
    for (const auto& [id, m] : per_basin) fc.values.push_back(m.weights[static_cast<Eigen::Index>(f)]);
    fc.per_basin = boxplot_stats(fc.values);
    fc.global_weight = global.weights[static_cast<Eigen::Index>(f)];
    out.push_back(std::move(fc));
  }
  return out;
}

std::vector<BasinRanking> rank_models(const MetricTable& table, const std::string& metric) {
  if (!is_known_metric(metric)) fail(ErrorKind::InvalidConfig, "unknown metric '" + metric + "'");
  std::set<std::string> models;
  for (const auto& [basin, row] : table)
    for (const auto& [model, m] : row) models.insert(model);
  // signed bias ranks by magnitude
  const std::string key = metric == "bias" ? "abs_bias" : metric;
  const bool descending = higher_is_better(key);

  std::vector<BasinRanking> out;
  for (const auto& [basin, row] : table) {
    for (const auto& model : models)
      if (!row.contains(model))
        fail(ErrorKind::MissingCell, "basin " + basin + " has no result for model " + model);
    std::vector<std::pair<std::string, std::optional<double>>> cells;
    for (const auto& [model, m] : row) cells.emplace_back(model, m.get(key));
    std::stable_sort(cells.begin(), cells.end(), [&](const auto& a, const auto& b) {
      if (a.second.has_value() != b.second.has_value()) return a.second.has_value();
      if (a.second && *a.second != *b.second) return descending ? *a.second > *b.second : *a.second < *b.second;
      return a.first < b.first;
    });
    BasinRanking r{basin, {}};
    for (auto& c : cells) r.order.push_back(c.first);
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, std::pair<std::size_t, std::size_t>> best_counts(const std::vector<BasinRanking>& ranks) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> out;
  for (const auto& r : ranks) {
    for (const auto& m : r.order) out.try_emplace(m, 0, 0);
    if (!r.order.empty()) ++out[r.best()].first;
    if (r.order.size() > 1) ++out[r.second()].second;
  }
  return out;
}

}  // namespace twsbench
