#include "twsbench/model_io.hpp"

#include <json.hpp>

#include "twsbench/errors.hpp"

namespace twsbench {

using json = nlohmann::ordered_json;

namespace {

json parse_or_fail(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, std::string("model json: ") + e.what());
  }
}

template <class T>
T get_or_fail(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Schema, std::string("model json: missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, std::string("model json: bad '") + key + "': " + e.what());
  }
}

json node_json(const std::vector<TreeNode>& nodes, int i) {
  const TreeNode& n = nodes[static_cast<std::size_t>(i)];
  json j;
  j["value"] = n.value;
  j["n"] = n.n;
  if (!n.is_leaf()) {
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_json(nodes, n.left);
    j["right"] = node_json(nodes, n.right);
  }
  return j;
}

// Preorder layout: node, left subtree, right subtree.
int read_node(const json& j, std::vector<TreeNode>& out) {
  const int idx = static_cast<int>(out.size());
  out.emplace_back();
  TreeNode n;
  n.value = get_or_fail<double>(j, "value");
  n.n = get_or_fail<std::size_t>(j, "n");
  if (j.contains("feature")) {
    n.feature = get_or_fail<int>(j, "feature");
    if (n.feature < 0) fail(ErrorKind::Schema, "model json: negative split feature");
    n.threshold = get_or_fail<double>(j, "threshold");
    n.left = read_node(get_or_fail<json>(j, "left"), out);
    n.right = read_node(get_or_fail<json>(j, "right"), out);
  }
  out[static_cast<std::size_t>(idx)] = n;
  return idx;
}

json tree_json(const RegressionTree& t) {
  if (t.nodes().empty()) return json::object();
  return node_json(t.nodes(), 0);
}

RegressionTree tree_from(const json& j) {
  std::vector<TreeNode> nodes;
  if (!j.empty()) read_node(j, nodes);
  return RegressionTree(std::move(nodes));
}

json tree_params_json(const TreeParams& p) {
  json j;
  j["max_depth"] = p.max_depth ? json(*p.max_depth) : json(nullptr);
  j["min_samples_split"] = p.min_samples_split;
  j["min_samples_leaf"] = p.min_samples_leaf;
  return j;
}

TreeParams tree_params_from(const json& j) {
  TreeParams p;
  const json md = get_or_fail<json>(j, "max_depth");
  if (!md.is_null()) p.max_depth = md.get<int>();
  p.min_samples_split = get_or_fail<int>(j, "min_samples_split");
  p.min_samples_leaf = get_or_fail<int>(j, "min_samples_leaf");
  return p;
}

}  // namespace

std::string linear_model_to_json(const LinearModel& m) {
  if (m.feature_names.size() != static_cast<std::size_t>(m.weights.size()))
    fail(ErrorKind::ManifestMismatch, "linear model weights do not match its feature names");
  json j;
  j["fitted_on"] = m.fitted_on;
  j["intercept"] = m.intercept;
  json w = json::object();
  for (std::size_t i = 0; i < m.feature_names.size(); ++i) w[m.feature_names[i]] = m.weights[static_cast<Eigen::Index>(i)];
  j["weights"] = std::move(w);
  j["dropped_columns"] = m.dropped_columns;
  return j.dump(2);
}

LinearModel linear_model_from_json(std::string_view text) {
  const json j = parse_or_fail(text);
  LinearModel m;
  m.fitted_on = get_or_fail<std::string>(j, "fitted_on");
  m.intercept = get_or_fail<double>(j, "intercept");
  const json w = get_or_fail<json>(j, "weights");
  if (!w.is_object()) fail(ErrorKind::Schema, "model json: weights must be an object");
  m.weights.resize(static_cast<Eigen::Index>(w.size()));
  Eigen::Index i = 0;
  for (auto it = w.begin(); it != w.end(); ++it, ++i) {
    m.feature_names.push_back(it.key());
    m.weights[i] = it.value().get<double>();
  }
  m.dropped_columns = get_or_fail<std::vector<std::size_t>>(j, "dropped_columns");
  return m;
}

std::string tree_to_json(const RegressionTree& tree) { return tree_json(tree).dump(2); }

RegressionTree tree_from_json(std::string_view text) { return tree_from(parse_or_fail(text)); }

std::string forest_to_json(const ForestModel& m) {
  json j;
  j["n_estimators"] = m.params.n_estimators;
  j["bootstrap"] = m.params.bootstrap;
  j["tree"] = tree_params_json(m.params.tree);
  j["tree_seeds"] = m.tree_seeds;
  json trees = json::array();
  for (const auto& t : m.trees) trees.push_back(tree_json(t));
  j["trees"] = std::move(trees);
  return j.dump(2);
}

ForestModel forest_from_json(std::string_view text) {
  const json j = parse_or_fail(text);
  ForestModel m;
  m.params.n_estimators = get_or_fail<int>(j, "n_estimators");
  m.params.bootstrap = get_or_fail<bool>(j, "bootstrap");
  m.params.tree = tree_params_from(get_or_fail<json>(j, "tree"));
  m.tree_seeds = get_or_fail<std::vector<std::uint64_t>>(j, "tree_seeds");
  for (const auto& t : get_or_fail<json>(j, "trees")) m.trees.push_back(tree_from(t));
  return m;
}

std::string boosted_to_json(const BoostedModel& m) {
  json j;
  const BoostParams& p = m.params;
  j["n_estimators"] = p.n_estimators;
  j["max_depth"] = p.max_depth;
  j["learning_rate"] = p.learning_rate;
  j["num_leaves"] = p.num_leaves;
  j["min_child_samples"] = p.min_child_samples;
  j["min_gain_to_split"] = p.min_gain_to_split;
  j["n_bins"] = p.n_bins;
  j["init"] = m.init;
  json trees = json::array();
  for (const auto& t : m.trees) trees.push_back(tree_json(t));
  j["trees"] = std::move(trees);
  return j.dump(2);
}

BoostedModel boosted_from_json(std::string_view text) {
  const json j = parse_or_fail(text);
  BoostedModel m;
  BoostParams& p = m.params;
  p.n_estimators = get_or_fail<int>(j, "n_estimators");
  p.max_depth = get_or_fail<int>(j, "max_depth");
  p.learning_rate = get_or_fail<double>(j, "learning_rate");
  p.num_leaves = get_or_fail<int>(j, "num_leaves");
  p.min_child_samples = get_or_fail<int>(j, "min_child_samples");
  p.min_gain_to_split = get_or_fail<double>(j, "min_gain_to_split");
  p.n_bins = get_or_fail<int>(j, "n_bins");
  m.init = get_or_fail<double>(j, "init");
  for (const auto& t : get_or_fail<json>(j, "trees")) m.trees.push_back(tree_from(t));
  return m;
}

}  // namespace twsbench
