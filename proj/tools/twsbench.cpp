// twsbench: synthesize datasets, validate inputs, run experiments, inspect reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twsbench/dataset.hpp"
#include "twsbench/errors.hpp"
#include "twsbench/experiment_config.hpp"
#include "twsbench/harness.hpp"
#include "twsbench/report.hpp"
#include "twsbench/synthetic.hpp"

namespace fs = std::filesystem;
using namespace twsbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Schema:
    case ErrorKind::MissingValue:
    case ErrorKind::Gap:
    case ErrorKind::OrphanBasin:
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidParams:
    case ErrorKind::UnknownScheme:
    case ErrorKind::ResolutionMismatch:
    case ErrorKind::HorizonExceedsSplit:
    case ErrorKind::MissingReport:
      return kExitInvalid;
    default:
      return kExitRuntime;
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidConfig, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path default_out(const std::string& leaf) {
  const char* root = std::getenv("TWSBENCH_OUT");
  return fs::path(root && *root ? root : "twsbench_out") / leaf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int parse_int(const std::string& s, const char* flag) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == s.size()) return v;
  } catch (...) {
  }
  fail(ErrorKind::InvalidConfig, std::string(flag) + " expects an integer, got '" + s + "'");
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string config, variant = "ol-like", profile = "desk", out;
  std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthArgs& a) {
  const Variant v = parse_variant(a.variant);
  if (v == Variant::Real) fail(ErrorKind::InvalidConfig, "synth cannot generate the 'real' variant");
  ExperimentConfig ec;
  ec.variant = v;
  ec.profile = parse_profile(a.profile);
  if (a.seed) ec.seed = *a.seed;
  SyntheticConfig cfg = ec.resolved_synthetic();
  if (!a.config.empty()) cfg = synthetic_config_from_json(read_text(a.config), cfg);
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const auto series = generate_synthetic(cfg);

  const fs::path out = a.out.empty() ? default_out("synth") : fs::path(a.out);
  fs::create_directories(out);
  write_basin_series(series, (out / "dynamic.csv").string(), (out / "static.csv").string());
  nlohmann::ordered_json man;
  man["generator"] = "twsbench synth";
  man["variant"] = std::string(to_string(v));
  man["config"] = nlohmann::ordered_json::parse(synthetic_config_to_json(cfg));
  man["n_basins"] = series.size();
  man["rows"] = series.size() * cfg.length;
  std::ofstream(out / "synth_manifest.json", std::ios::binary) << man.dump(2) << "\n";
  std::cout << "wrote " << series.size() << " basins x " << cfg.length << " steps to " << out.string() << "\n";
  return kExitOk;
}

// ---- validate --------------------------------------------------------------

int cmd_validate(const std::string& dynamic_path, const std::string& static_path) {
  const auto violations = validate_dataset_files(dynamic_path, static_path);
  if (violations.empty()) {
    std::cout << "ok: no violations\n";
    return kExitOk;
  }
  const std::size_t shown = std::min<std::size_t>(20, violations.size());
  for (std::size_t i = 0; i < shown; ++i)
    std::cout << violations[i].kind << ": " << violations[i].message << "\n";
  if (violations.size() > shown) std::cout << "... " << violations.size() - shown << " more\n";
  std::cout << violations.size() << " violation(s)\n";
  return kExitInvalid;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  std::string config, experiment, variant, models, seq_len, horizon, profile, seed, workers, out;
};

int cmd_run(const RunArgs& a) {
  ExperimentConfig cfg;
  if (!a.config.empty()) cfg = experiment_config_from_json(read_text(a.config));

  nlohmann::json patch = nlohmann::json::object();
  if (!a.experiment.empty()) patch["experiment"] = a.experiment;
  if (!a.variant.empty()) patch["variant"] = a.variant;
  if (!a.profile.empty()) patch["profile"] = a.profile;
  if (!a.models.empty()) patch["models"] = split_list(a.models);
  if (!a.seed.empty()) {
    try {
      std::size_t pos = 0;
      patch["seed"] = std::stoull(a.seed, &pos);
      if (pos != a.seed.size()) throw std::invalid_argument(a.seed);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidConfig, "--seed expects a non-negative integer, got '" + a.seed + "'");
    }
  }
  if (!a.workers.empty()) patch["workers"] = parse_int(a.workers, "--workers");
  if (!a.out.empty()) patch["out"] = a.out;
  cfg = merge_experiment_config(cfg, patch.dump());

  // kind-specific flags are applied after the kind is known
  nlohmann::json kind_patch = nlohmann::json::object();
  if (!a.seq_len.empty()) {
    const auto parts = split_list(a.seq_len);
    if (cfg.kind == ExperimentKind::SeqLenSweep) {
      std::vector<int> ls;
      for (const auto& p : parts) ls.push_back(parse_int(p, "--seq-len"));
      kind_patch["seq_lens"] = ls;
    } else {
      if (parts.size() != 1) fail(ErrorKind::InvalidConfig, "--seq-len takes one value outside seq_len_sweep");
      kind_patch["seq_len"] = parse_int(parts[0], "--seq-len");
    }
  }
  if (!a.horizon.empty()) {
    if (cfg.kind != ExperimentKind::ForecastSweep)
      fail(ErrorKind::InvalidConfig, "--horizon only applies to forecast_sweep");
    kind_patch["horizon"] = parse_int(a.horizon, "--horizon");
  }
  cfg = merge_experiment_config(cfg, kind_patch.dump());
  // also catches an explicit --seed or a synthetic override sitting in the config file
  if (!a.seed.empty() && cfg.synthetic) cfg.synthetic->seed = cfg.seed;
  cfg.validate();

  const fs::path out = cfg.output_dir.empty() ? default_out(std::string(to_string(cfg.kind))) : fs::path(cfg.output_dir);
  const ExperimentResult res = run_experiment(cfg);
  write_report(res.report, out);

  for (const auto& s : res.summaries) {
    std::cout << std::left << std::setw(16) << s.model;
    if (!s.setting.empty()) std::cout << " " << std::setw(8) << s.setting;
    std::cout << " median NSE " << (s.median_nse ? format_double(*s.median_nse) : "undefined") << ", median KGE "
              << (s.median_kge ? format_double(*s.median_kge) : "undefined") << "\n";
  }
  std::cout << "report: " << out.string() << "\n";
  return kExitOk;
}

// ---- inspect ---------------------------------------------------------------

struct InspectArgs {
  std::string dir, basin, model, metric;
  bool best_counts = false;
  bool csv = false;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

void print_table(const std::vector<std::vector<std::string>>& rows, bool csv) {
  if (csv) {
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << r[i];
      std::cout << "\n";
    }
    return;
  }
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], r[i].size());
    }
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      std::cout << std::left << std::setw(static_cast<int>(width[i]) + (i + 1 < r.size() ? 2 : 0)) << r[i];
    std::cout << "\n";
  }
}

int cmd_inspect(const InspectArgs& a) {
  const fs::path dir(a.dir);
  if (!fs::is_regular_file(dir / "manifest.json")) fail(ErrorKind::MissingReport, "no report at " + dir.string());
  if (a.best_counts) {
    if (!fs::is_regular_file(dir / "rankings.csv"))
      fail(ErrorKind::MissingReport, "report has no rankings.csv (single-model run?)");
    const auto rows = parse_csv(read_report(dir).at("rankings.csv"));
    // experiment -> model -> (best, second)
    std::map<std::string, std::map<std::string, std::pair<int, int>>> tally;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() < 4) continue;
      ++tally[r[0]][r[2]].first;
      if (!r[3].empty()) ++tally[r[0]][r[3]].second;
    }
    std::vector<std::vector<std::string>> out{{"experiment", "model", "best", "second"}};
    for (const auto& [exp, models] : tally)
      for (const auto& [m, c] : models) {
        if (!a.model.empty() && m != a.model) continue;
        out.push_back({exp, m, std::to_string(c.first), std::to_string(c.second)});
      }
    print_table(out, a.csv);
    return kExitOk;
  }
  const auto rows = parse_csv(read_report(dir).at("metrics.csv"));
  if (rows.empty()) return kExitOk;
  std::vector<std::vector<std::string>> out{rows[0]};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() < 6) continue;
    if (!a.basin.empty() && r[0] != a.basin) continue;
    if (!a.model.empty() && r[1] != a.model) continue;
    if (!a.metric.empty() && r[3] != a.metric) continue;
    out.push_back(r);
  }
  print_table(out, a.csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twsbench: terrestrial water storage model benchmark"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic basin dataset");
  synth->add_option("--config", sa.config, "synthetic generator JSON (overrides the variant preset)");
  synth->add_option("--variant", sa.variant, "ol-like | da-like");
  synth->add_option("--profile", sa.profile, "desk (16 basins) | paper (515 basins)");
  synth->add_option("--seed", sa.seed, "generator seed");
  synth->add_option("--out", sa.out, "output directory");

  std::string v_dynamic, v_static;
  auto* validate = app.add_subcommand("validate", "check dataset files against the schemas");
  validate->add_option("dynamic", v_dynamic, "dynamic CSV")->required();
  validate->add_option("static", v_static, "static CSV")->required();

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run an experiment and write its report");
  run->add_option("--config", ra.config, "experiment config JSON");
  run->add_option("--experiment", ra.experiment,
                  "regression_tournament | seq_len_sweep | forecast_sweep | daily_smoothed | "
                  "time_index_ablation | tree_baselines");
  run->add_option("--variant", ra.variant, "ol-like | da-like | real");
  run->add_option("--models", ra.models, "comma-separated model names");
  run->add_option("--seq-len", ra.seq_len, "sequence length (comma list for seq_len_sweep)");
  run->add_option("--horizon", ra.horizon, "forecast horizon (forecast_sweep)");
  run->add_option("--profile", ra.profile, "desk | paper");
  run->add_option("--seed", ra.seed, "experiment seed");
  run->add_option("--workers", ra.workers, "worker threads");
  run->add_option("--out", ra.out, "report directory (default $TWSBENCH_OUT/<experiment>)");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect", "summarize a report directory");
  inspect->add_option("dir", ia.dir, "report directory")->required();
  inspect->add_option("--basin", ia.basin, "filter by basin id");
  inspect->add_option("--model", ia.model, "filter by model");
  inspect->add_option("--metric", ia.metric, "filter by metric (bias, rmse, corr, nse, kge)");
  inspect->add_flag("--best-counts", ia.best_counts, "tally best/second-best models from rankings.csv");
  inspect->add_flag("--csv", ia.csv, "emit CSV instead of an aligned table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*synth) return cmd_synth(sa);
    if (*validate) return cmd_validate(v_dynamic, v_static);
    if (*run) return cmd_run(ra);
    if (*inspect) return cmd_inspect(ia);
  } catch (const Error& e) {
    std::cerr << "twsbench: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "twsbench: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
