#include "twsbench/neural/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "twsbench/dataset.hpp"
#include "twsbench/errors.hpp"

namespace twsbench::nn {

using json = nlohmann::ordered_json;

namespace {

json config_json(const NeuralConfig& c) {
  return {{"kind", std::string(to_string(c.kind))}, {"input_size", c.input_size}, {"static_size", c.static_size},
          {"hidden", c.hidden},  {"heads", c.heads},   {"outputs", c.outputs},     {"dropout", c.dropout},
          {"use_time_index", c.use_time_index}, {"init", std::string(to_string(c.init))}};
}

NeuralConfig config_from(const json& j) {
  NeuralConfig c;
  c.kind = parse_model_kind(j.at("kind").get<std::string>());
  c.input_size = j.at("input_size").get<Eigen::Index>();
  c.static_size = j.at("static_size").get<Eigen::Index>();
  c.hidden = j.at("hidden").get<Eigen::Index>();
  c.heads = j.at("heads").get<Eigen::Index>();
  c.outputs = j.at("outputs").get<Eigen::Index>();
  c.dropout = j.at("dropout").get<double>();
  c.use_time_index = j.at("use_time_index").get<bool>();
  c.init = parse_init_scheme(j.at("init").get<std::string>());
  return c;
}

}  // namespace

std::string checkpoint_json(const NeuralModel& model) {
  json j;
  j["config"] = config_json(model.config());
  json tensors = json::object();
  const auto& p = model.params();
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<double> data(p[i].data(), p[i].data() + p[i].size());
    tensors[p.name(i)] = {{"shape", {p[i].rows(), p[i].cols()}}, {"data", data}};
  }
  j["tensors"] = std::move(tensors);
  return j.dump();
}

std::unique_ptr<NeuralModel> model_from_checkpoint_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    auto model = make_model(config_from(j.at("config")));
    auto& p = model->params();
    const auto& tensors = j.at("tensors");
    if (tensors.size() != p.size()) fail(ErrorKind::ShapeMismatch, "checkpoint tensor count differs from the model");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto& t = tensors.at(p.name(i));
      const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
      const auto data = t.at("data").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] != p[i].rows() || shape[1] != p[i].cols() ||
          static_cast<Eigen::Index>(data.size()) != p[i].size())
        fail(ErrorKind::ShapeMismatch, "checkpoint tensor '" + p.name(i) + "' has the wrong shape");
      p[i] = Eigen::Map<const Eigen::MatrixXd>(data.data(), p[i].rows(), p[i].cols());
    }
    model->mark_initialized();
    return model;
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const NeuralModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << checkpoint_json(model);
}

std::unique_ptr<NeuralModel> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_checkpoint_json(ss.str());
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string s = "epoch,train_loss,val_loss\n";
  for (const auto& r : history)
    s += std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," + format_double(r.val_loss) + "\n";
  return s;
}

}  // namespace twsbench::nn
