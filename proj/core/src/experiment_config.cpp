#include "twsbench/experiment_config.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "twsbench/errors.hpp"
#include "twsbench/neural/loss.hpp"

namespace twsbench {

using json = nlohmann::ordered_json;

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table, const char* what) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  fail(ErrorKind::InvalidConfig, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, ExperimentKind>, 6> kKinds{{
    {"regression_tournament", ExperimentKind::RegressionTournament},
    {"seq_len_sweep", ExperimentKind::SeqLenSweep},
    {"forecast_sweep", ExperimentKind::ForecastSweep},
    {"daily_smoothed", ExperimentKind::DailySmoothed},
    {"time_index_ablation", ExperimentKind::TimeIndexAblation},
    {"tree_baselines", ExperimentKind::TreeBaselines},
}};
constexpr std::array<std::pair<std::string_view, Variant>, 3> kVariants{{
    {"ol-like", Variant::OlLike}, {"da-like", Variant::DaLike}, {"real", Variant::Real}}};
constexpr std::array<std::pair<std::string_view, Profile>, 2> kProfiles{{{"desk", Profile::Desk}, {"paper", Profile::Paper}}};

template <class E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table)
    if (value == v) return name;
  return "?";
}

}  // namespace

std::string_view to_string(ExperimentKind k) { return name_of(k, kKinds); }
std::string_view to_string(Variant v) { return name_of(v, kVariants); }
std::string_view to_string(Profile p) { return name_of(p, kProfiles); }
ExperimentKind parse_experiment_kind(std::string_view s) { return parse_enum(s, kKinds, "experiment kind"); }
Variant parse_variant(std::string_view s) { return parse_enum(s, kVariants, "variant"); }
Profile parse_profile(std::string_view s) { return parse_enum(s, kProfiles, "profile"); }

std::string canonical_model_name(std::string_view name) {
  for (auto n : {kLinearSingle, kLinearGlob, kLstm, kTft, kTftNoTime, kRandomForest, kBoosted})
    if (name == n) return std::string(n);
  if (name == "TFT-lite") return std::string(kTft);
  if (name == "LightGBM") return std::string(kBoosted);
  fail(ErrorKind::InvalidConfig, "unknown model '" + std::string(name) + "'");
}

bool is_neural_model(std::string_view m) { return m == kLstm || m == kTft || m == kTftNoTime; }

std::vector<std::string> ExperimentConfig::resolved_models() const {
  std::vector<std::string> out;
  if (models.empty()) {
    switch (kind) {
      case ExperimentKind::TimeIndexAblation:
        out = {std::string(kLinearSingle), std::string(kTft), std::string(kTftNoTime)};
        break;
      case ExperimentKind::TreeBaselines:
        out = {std::string(kLinearSingle), std::string(kRandomForest), std::string(kBoosted)};
        break;
      default:
        out = {std::string(kLinearSingle), std::string(kLinearGlob), std::string(kLstm), std::string(kTft)};
    }
  } else {
    for (const auto& m : models) out.push_back(canonical_model_name(m));
  }
  if (kind == ExperimentKind::TimeIndexAblation &&
      std::find(out.begin(), out.end(), kTftNoTime) == out.end())
    out.emplace_back(kTftNoTime);
  return out;
}

void ExperimentConfig::validate() const {
  const auto ms = resolved_models();
  if (ms.empty()) fail(ErrorKind::InvalidConfig, "model list is empty");
  if (std::set<std::string>(ms.begin(), ms.end()).size() != ms.size())
    fail(ErrorKind::InvalidConfig, "model list contains duplicates");
  auto has = [&](std::string_view m) { return std::find(ms.begin(), ms.end(), m) != ms.end(); };
  if (effective_sequence_length() < 1) fail(ErrorKind::InvalidConfig, "seq_len must be >= 1");
  if (smoothing_window < 1) fail(ErrorKind::InvalidConfig, "smoothing_window must be >= 1");
  if (daily_stride < 1) fail(ErrorKind::InvalidConfig, "daily_stride must be >= 1");
  if (workers < 1) fail(ErrorKind::InvalidConfig, "workers must be >= 1");
  if (!(tree_holdout_fraction > 0.0 && tree_holdout_fraction < 1.0))
    fail(ErrorKind::InvalidConfig, "trees.holdout_fraction must lie in (0, 1)");
  try {
    nn::validate_quantiles(quantiles);
  } catch (const Error& e) {
    fail(ErrorKind::InvalidConfig, e.what());
  }
  switch (kind) {
    case ExperimentKind::SeqLenSweep:
      if (sequence_lengths.empty()) fail(ErrorKind::InvalidConfig, "seq_len_sweep needs a nonempty seq_lens list");
      for (int L : sequence_lengths)
        if (L < 1) fail(ErrorKind::InvalidConfig, "seq_lens entries must be >= 1");
      break;
    case ExperimentKind::ForecastSweep:
      if (horizon < 1) fail(ErrorKind::InvalidConfig, "forecast_sweep needs horizon >= 1");
      break;
    case ExperimentKind::TimeIndexAblation:
      if (!has(kTft)) fail(ErrorKind::InvalidConfig, "time_index_ablation requires TFT in the model list");
      break;
    case ExperimentKind::TreeBaselines:
      if (!has(kRandomForest) && !has(kBoosted))
        fail(ErrorKind::InvalidConfig, "tree_baselines requires RF or Boosted in the model list");
      break;
    default:
      break;
  }
  if (variant == Variant::Real && !uses_files())
    fail(ErrorKind::InvalidConfig, "variant 'real' requires data.dynamic and data.static paths");
  if (uses_files() && (dynamic_path.empty() || static_path.empty()))
    fail(ErrorKind::InvalidConfig, "both data.dynamic and data.static are required");
  if (uses_files() && synthetic) fail(ErrorKind::InvalidConfig, "data has both file paths and a synthetic config");
  if (neural.hidden && *neural.hidden < 1) fail(ErrorKind::InvalidConfig, "neural.hidden must be >= 1");
  if (neural.heads && *neural.heads < 1) fail(ErrorKind::InvalidConfig, "neural.heads must be >= 1");
  for (const auto& m : ms)
    if (m == kTft || m == kTftNoTime) {
      const auto s = neural_settings(m);
      if (s.hidden % s.heads != 0)
        fail(ErrorKind::InvalidConfig, "TFT hidden size " + std::to_string(s.hidden) + " is not divisible by " +
                                           std::to_string(s.heads) + " heads");
    }
  if (synthetic) resolved_synthetic().validate();
}

int ExperimentConfig::effective_sequence_length() const {
  return sequence_length.value_or(kind == ExperimentKind::DailySmoothed ? 365 : 12);
}

SyntheticConfig ExperimentConfig::resolved_synthetic() const {
  if (synthetic) return *synthetic;
  const std::size_t n = profile == Profile::Paper ? 515 : 16;
  return variant == Variant::DaLike ? SyntheticConfig::da_like(n, seed) : SyntheticConfig::ol_like(n, seed);
}

NeuralSettings ExperimentConfig::neural_settings(std::string_view m) const {
  // Per-variant columns; the real-data variant uses the OL column.
  const bool da = variant == Variant::DaLike;
  const bool paper = profile == Profile::Paper;
  NeuralSettings s;
  if (m == kLstm) {
    s.hidden = paper ? (da ? 64 : 512) : 32;
    s.heads = 1;
    s.learning_rate = da ? 0.0097 : 0.0016;
    s.dropout = da ? 0.1 : 0.2;
    s.init = da ? nn::InitScheme::Orthogonal : nn::InitScheme::Xavier;
  } else {
    s.hidden = paper ? 80 : 32;
    s.heads = paper ? (da ? 4 : 5) : 4;
    s.learning_rate = da ? 0.0011 : 0.0016;
    s.dropout = 0.2;
    s.init = nn::InitScheme::Xavier;
  }
  s.max_epochs = paper ? 100 : 50;
  if (neural.hidden) s.hidden = *neural.hidden;
  if (neural.heads && m != kLstm) s.heads = *neural.heads;
  if (neural.learning_rate) s.learning_rate = *neural.learning_rate;
  if (neural.dropout) s.dropout = *neural.dropout;
  if (neural.init) s.init = *neural.init;
  if (neural.max_epochs) s.max_epochs = *neural.max_epochs;
  if (neural.patience) s.patience = *neural.patience;
  if (neural.batch_size) s.batch_size = *neural.batch_size;
  if (neural.min_delta) s.min_delta = *neural.min_delta;
  return s;
}

namespace {

void apply_json(ExperimentConfig& c, const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidConfig, "experiment config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "experiment") c.kind = parse_experiment_kind(v.get<std::string>());
    else if (k == "variant") c.variant = parse_variant(v.get<std::string>());
    else if (k == "profile") c.profile = parse_profile(v.get<std::string>());
    else if (k == "models") c.models = v.get<std::vector<std::string>>();
    else if (k == "seq_len") c.sequence_length = v.get<int>();
    else if (k == "seq_lens") c.sequence_lengths = v.get<std::vector<int>>();
    else if (k == "horizon") c.horizon = v.get<int>();
    else if (k == "smoothing_window") c.smoothing_window = v.get<int>();
    else if (k == "daily_stride") c.daily_stride = v.get<int>();
    else if (k == "quantiles") c.quantiles = v.get<std::vector<double>>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else if (k == "workers") {
      const auto w = v.get<long long>();
      if (w < 1) fail(ErrorKind::InvalidConfig, "workers must be >= 1");
      c.workers = static_cast<std::size_t>(w);
    } else if (k == "out") c.output_dir = v.get<std::string>();
    else if (k == "data") {
      if (!v.is_object()) fail(ErrorKind::InvalidConfig, "data must be an object");
      for (auto d = v.begin(); d != v.end(); ++d) {
        if (d.key() == "dynamic") c.dynamic_path = d.value().get<std::string>();
        else if (d.key() == "static") c.static_path = d.value().get<std::string>();
        else if (d.key() == "synthetic")
          c.synthetic = synthetic_config_from_json(d.value().dump(), c.synthetic ? *c.synthetic : c.resolved_synthetic());
        else fail(ErrorKind::InvalidConfig, "unknown data key '" + d.key() + "'");
      }
    } else if (k == "neural") {
      if (!v.is_object()) fail(ErrorKind::InvalidConfig, "neural must be an object");
      auto& n = c.neural;
      for (auto d = v.begin(); d != v.end(); ++d) {
        const auto& key = d.key();
        const auto& val = d.value();
        if (key == "hidden") n.hidden = val.get<long>();
        else if (key == "heads") n.heads = val.get<long>();
        else if (key == "learning_rate") n.learning_rate = val.get<double>();
        else if (key == "dropout") n.dropout = val.get<double>();
        else if (key == "init") n.init = nn::parse_init_scheme(val.get<std::string>());
        else if (key == "max_epochs") n.max_epochs = val.get<int>();
        else if (key == "patience") n.patience = val.get<int>();
        else if (key == "batch_size") {
          const auto b = val.get<long long>();
          if (b < 1) fail(ErrorKind::InvalidConfig, "neural.batch_size must be >= 1");
          n.batch_size = static_cast<std::size_t>(b);
        } else if (key == "min_delta") n.min_delta = val.get<double>();
        else fail(ErrorKind::InvalidConfig, "unknown neural key '" + key + "'");
      }
    } else if (k == "trees") {
      if (!v.is_object()) fail(ErrorKind::InvalidConfig, "trees must be an object");
      for (auto d = v.begin(); d != v.end(); ++d) {
        if (d.key() == "holdout_fraction") c.tree_holdout_fraction = d.value().get<double>();
        else fail(ErrorKind::InvalidConfig, "unknown trees key '" + d.key() + "'");
      }
    } else {
      fail(ErrorKind::InvalidConfig, "unknown config key '" + k + "'");
    }
  }
}

}  // namespace

ExperimentConfig merge_experiment_config(const ExperimentConfig& base, std::string_view json_text) {
  ExperimentConfig c = base;
  try {
    apply_json(c, json::parse(json_text));
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("config error: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    fail(ErrorKind::InvalidConfig, e.what());
  }
  return c;
}

ExperimentConfig experiment_config_from_json(std::string_view json_text) {
  return merge_experiment_config(ExperimentConfig{}, json_text);
}

std::string experiment_config_to_json(const ExperimentConfig& c, bool for_manifest) {
  json j;
  j["experiment"] = std::string(to_string(c.kind));
  j["variant"] = std::string(to_string(c.variant));
  j["profile"] = std::string(to_string(c.profile));
  j["models"] = c.resolved_models();
  j["seq_len"] = c.effective_sequence_length();
  j["seq_lens"] = c.sequence_lengths;
  j["horizon"] = c.horizon;
  j["smoothing_window"] = c.smoothing_window;
  j["daily_stride"] = c.daily_stride;
  j["quantiles"] = c.quantiles;
  j["seed"] = c.seed;
  if (!for_manifest) {
    j["workers"] = c.workers;
    j["out"] = c.output_dir;
  }
  json data;
  if (c.uses_files()) {
    data["dynamic"] = c.dynamic_path;
    data["static"] = c.static_path;
  } else {
    data["synthetic"] = json::parse(synthetic_config_to_json(c.resolved_synthetic()));
  }
  j["data"] = data;
  json overrides = json::object();
  const auto& n = c.neural;
  if (n.hidden) overrides["hidden"] = *n.hidden;
  if (n.heads) overrides["heads"] = *n.heads;
  if (n.learning_rate) overrides["learning_rate"] = *n.learning_rate;
  if (n.dropout) overrides["dropout"] = *n.dropout;
  if (n.init) overrides["init"] = std::string(nn::to_string(*n.init));
  if (n.max_epochs) overrides["max_epochs"] = *n.max_epochs;
  if (n.patience) overrides["patience"] = *n.patience;
  if (n.batch_size) overrides["batch_size"] = *n.batch_size;
  if (n.min_delta) overrides["min_delta"] = *n.min_delta;
  j["neural"] = overrides;
  if (for_manifest) {
    json resolved = json::object();
    for (auto m : {kLstm, kTft}) {
      const auto s = c.neural_settings(m);
      json e;
      e["hidden"] = s.hidden;
      e["heads"] = s.heads;
      e["learning_rate"] = s.learning_rate;
      e["dropout"] = s.dropout;
      e["init"] = std::string(nn::to_string(s.init));
      e["max_epochs"] = s.max_epochs;
      e["patience"] = s.patience;
      e["min_delta"] = s.min_delta;
      e["batch_size"] = s.batch_size;
      resolved[std::string(m)] = e;
    }
    j["neural_resolved"] = resolved;
  }
  json trees;
  trees["holdout_fraction"] = c.tree_holdout_fraction;
  j["trees"] = trees;
  return j.dump(2);
}

}  // namespace twsbench
