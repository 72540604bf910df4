//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/checkpoint.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gcnx/error.h"

namespace gcnx {

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Matrix &m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
  j["data"] = std::move(data);
  return j;
}

Matrix matrix_from_json(const json &j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json &data = j.at("data");
  if (rows < 0 || cols < 0
      || data.size() != static_cast<std::size_t>(rows * cols))
    throw DataError("checkpoint matrix has inconsistent shape");
  Matrix m(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[idx++].get<double>();
  return m;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint &c) {
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["tool_version"] = c.tool_version;
  j["config_hash"] = c.config_hash;
  json scheme;
  json vocab = json::array();
  for (Element e : c.scheme.element_vocab)
    vocab.push_back(std::string(element_symbol(e)));
  scheme["element_vocab"] = vocab;
  scheme["max_degree"] = c.scheme.max_degree;
  scheme["min_charge"] = c.scheme.min_charge;
  scheme["max_charge"] = c.scheme.max_charge;
  scheme["d_in"] = c.scheme.d_in();
  j["featurization"] = scheme;
  j["layer_sizes"] = c.params.layer_sizes();
  j["n_classes"] = c.params.n_classes();
  json layers = json::array();
  for (const auto &w : c.params.layer_weights) layers.push_back(matrix_to_json(w));
  j["layer_weights"] = layers;
  j["classifier_weights"] = matrix_to_json(c.params.classifier_weights);
  json cfg;
  cfg["epochs"] = c.config.epochs;
  cfg["learning_rate"] = c.config.learning_rate;
  cfg["adam_beta1"] = c.config.adam_beta1;
  cfg["adam_beta2"] = c.config.adam_beta2;
  cfg["adam_eps"] = c.config.adam_eps;
  cfg["layer_sizes"] = c.config.layer_sizes;
  cfg["class_weighting"] = c.config.class_weighting;
  cfg["batch_size"] = c.config.batch_size;
  j["training_config"] = cfg;
  j["seed"] = c.config.seed;
  return j.dump(1) + "\n";
}

Checkpoint parse_checkpoint(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw DataError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion)
      throw DataError("unsupported checkpoint format_version "
                      + std::to_string(version));
    Checkpoint c;
    c.tool_version = j.value("tool_version", "");
    c.config_hash = j.value("config_hash", "");
    const json &scheme = j.at("featurization");
    c.scheme.element_vocab.clear();
    for (const auto &s : scheme.at("element_vocab"))
      c.scheme.element_vocab.push_back(
          element_from_symbol(s.get<std::string>()));
    c.scheme.max_degree = scheme.at("max_degree").get<int>();
    c.scheme.min_charge = scheme.at("min_charge").get<int>();
    c.scheme.max_charge = scheme.at("max_charge").get<int>();
    for (const auto &w : j.at("layer_weights"))
      c.params.layer_weights.push_back(matrix_from_json(w));
    c.params.classifier_weights = matrix_from_json(j.at("classifier_weights"));
    c.params.validate();
    if (c.params.input_width() != c.scheme.d_in())
      throw DataError("checkpoint input width differs from featurization");
    const json &cfg = j.at("training_config");
    c.config.epochs = cfg.at("epochs").get<int>();
    c.config.learning_rate = cfg.at("learning_rate").get<double>();
    c.config.adam_beta1 = cfg.at("adam_beta1").get<double>();
    c.config.adam_beta2 = cfg.at("adam_beta2").get<double>();
    c.config.adam_eps = cfg.at("adam_eps").get<double>();
    c.config.layer_sizes = cfg.at("layer_sizes").get<std::vector<int>>();
    c.config.class_weighting = cfg.at("class_weighting").get<bool>();
    c.config.batch_size = cfg.at("batch_size").get<int>();
    c.config.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError &e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint &checkpoint,
                     const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << serialize_checkpoint(checkpoint);
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace gcnx
