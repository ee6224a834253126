#include "twsbench/grid_search.hpp"

#include <cmath>
#include <map>

#include "twsbench/errors.hpp"

namespace twsbench {

std::string_view to_string(TreeFamily f) { return f == TreeFamily::RandomForest ? "RF" : "Boosted"; }

std::size_t GridSearchSpec::candidate_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return axes.empty() ? 0 : n;
}

std::vector<std::vector<ParamValue>> GridSearchSpec::candidates() const {
  std::vector<std::vector<ParamValue>> out;
  if (axes.empty()) return out;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    std::vector<ParamValue> c;
    for (std::size_t a = 0; a < axes.size(); ++a) c.push_back(axes[a].values[idx[a]]);
    out.push_back(std::move(c));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

void GridSearchSpec::validate() const {
  if (axes.empty()) fail(ErrorKind::InvalidParams, "grid has no parameters");
  for (const auto& a : axes)
    if (a.values.empty()) fail(ErrorKind::InvalidParams, "grid axis '" + a.name + "' has no candidates");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    fail(ErrorKind::InvalidParams, "holdout_fraction must be in (0, 1)");
}

GridSearchSpec GridSearchSpec::random_forest_default() {
  GridSearchSpec s;
  s.axes = {{"n_estimators", {10.0, 50.0, 100.0}},
            {"max_depth", {5.0, 10.0, std::nullopt}},
            {"min_samples_split", {2.0, 5.0, 10.0}},
            {"min_samples_leaf", {2.0, 5.0, 10.0}}};
  return s;
}

GridSearchSpec GridSearchSpec::boosted_default() {
  GridSearchSpec s;
  s.axes = {{"n_estimators", {10.0, 50.0, 100.0}},
            {"max_depth", {3.0, 5.0, 7.0}},
            {"learning_rate", {0.01, 0.05, 0.1}},
            {"num_leaves", {10.0, 20.0, 30.0}},
            {"min_child_samples", {20.0, 30.0}},
            {"min_gain_to_split", {0.01, 0.05}}};
  return s;
}

namespace {

int as_int(const ParamValue& v, const std::string& name) {
  if (!v) fail(ErrorKind::InvalidParams, "parameter '" + name + "' cannot be None");
  return static_cast<int>(std::llround(*v));
}

}  // namespace

ForestParams forest_params_from(const std::vector<std::string>& names, const std::vector<ParamValue>& values) {
  ForestParams p;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& n = names[i];
    const auto& v = values[i];
    if (n == "n_estimators") p.n_estimators = as_int(v, n);
    else if (n == "max_depth") p.tree.max_depth = v ? std::optional<int>(as_int(v, n)) : std::nullopt;
    else if (n == "min_samples_split") p.tree.min_samples_split = as_int(v, n);
    else if (n == "min_samples_leaf") p.tree.min_samples_leaf = as_int(v, n);
    else fail(ErrorKind::InvalidParams, "unknown forest parameter '" + n + "'");
  }
  p.validate();
  return p;
}

BoostParams boost_params_from(const std::vector<std::string>& names, const std::vector<ParamValue>& values) {
  BoostParams p;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& n = names[i];
    const auto& v = values[i];
    if (n == "n_estimators") p.n_estimators = as_int(v, n);
    else if (n == "max_depth") p.max_depth = v ? as_int(v, n) : -1;
    else if (n == "learning_rate") p.learning_rate = v.value_or(0.1);
    else if (n == "num_leaves") p.num_leaves = as_int(v, n);
    else if (n == "min_child_samples") p.min_child_samples = as_int(v, n);
    else if (n == "min_gain_to_split") p.min_gain_to_split = v.value_or(0.0);
    else fail(ErrorKind::InvalidParams, "unknown boosting parameter '" + n + "'");
  }
  p.validate();
  return p;
}

Eigen::VectorXd GridSearchResult::predict(const Eigen::MatrixXd& X) const {
  return std::visit([&](const auto& m) { return m.predict(X); }, model);
}

GridSearchResult grid_search(TreeFamily family, const GridSearchSpec& spec, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, std::uint64_t seed) {
  spec.validate();
  if (X.rows() < 10) fail(ErrorKind::EmptyInput, "grid search needs at least 10 training rows");
  const Eigen::Index n = X.rows();
  const auto n_hold = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(spec.holdout_fraction * static_cast<double>(n))));
  const Eigen::Index n_fit = n - n_hold;
  const Eigen::MatrixXd X_fit = X.topRows(n_fit);
  const Eigen::VectorXd y_fit = y.head(n_fit);
  const Eigen::MatrixXd X_hold = X.bottomRows(n_hold);
  const Eigen::VectorXd y_hold = y.tail(n_hold);

  GridSearchResult res;
  for (const auto& a : spec.axes) res.names.push_back(a.name);
  std::size_t est_axis = res.names.size();
  for (std::size_t i = 0; i < res.names.size(); ++i)
    if (res.names[i] == "n_estimators") est_axis = i;

  const auto cands = spec.candidates();
  // group key: candidate with n_estimators removed -> fitted ensemble at the largest count
  std::map<std::vector<ParamValue>, TreeEnsemble> fitted;
  auto key_of = [&](std::vector<ParamValue> c) {
    if (est_axis < c.size()) c[est_axis] = std::nullopt;
    return c;
  };
  auto max_estimators = [&](const std::vector<ParamValue>& key) {
    ParamValue best = 0.0;
    for (const auto& c : cands)
      if (key_of(c) == key && est_axis < c.size()) best = std::max(*best, c[est_axis].value_or(0.0));
    return best;
  };

  double best_mae = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    const auto key = key_of(c);
    auto it = fitted.find(key);
    if (it == fitted.end()) {
      auto full = c;
      if (est_axis < full.size()) full[est_axis] = max_estimators(key);
      if (family == TreeFamily::RandomForest)
        it = fitted.emplace(key, fit_forest(X_fit, y_fit, forest_params_from(res.names, full), seed)).first;
      else
        it = fitted.emplace(key, fit_boosted(X_fit, y_fit, boost_params_from(res.names, full), seed)).first;
    }
    const std::size_t k = est_axis < c.size() ? static_cast<std::size_t>(as_int(c[est_axis], "n_estimators")) : 0;
    const Eigen::VectorXd pred = std::visit([&](const auto& m) { return m.predict(X_hold, k); }, it->second);
    const double mae = (pred - y_hold).cwiseAbs().mean();
    res.evaluated.push_back(CandidateScore{c, mae});
    if (mae < best_mae) {
      best_mae = mae;
      res.best_index = res.evaluated.size() - 1;
    }
  }
  const auto& winner = res.evaluated[res.best_index].values;
  if (family == TreeFamily::RandomForest)
    res.model = fit_forest(X, y, forest_params_from(res.names, winner), seed);
  else
    res.model = fit_boosted(X, y, boost_params_from(res.names, winner), seed);
  return res;
}

}  // namespace twsbench
