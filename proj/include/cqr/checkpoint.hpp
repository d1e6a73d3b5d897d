#ifndef CQR_CHECKPOINT_HPP
#define CQR_CHECKPOINT_HPP

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cqr/algo.hpp"

namespace cqr {

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline nlohmann::json net_config_to_json(const NetConfig& c) {
  return {{"input_dim", c.input_dim},
          {"hidden_sizes", c.hidden_sizes},
          {"activation", c.activation == Activation::ReLU ? "relu" : "gelu"},
          {"n_outputs", c.n_outputs},
          {"dropout_enabled", c.dropout_enabled},
          {"dropout_rate", c.dropout_rate}};
}

inline NetConfig net_config_from_json(const nlohmann::json& j) {
  NetConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
  const std::string act = j.at("activation").get<std::string>();
  if (act == "relu")
    c.activation = Activation::ReLU;
  else if (act == "gelu")
    c.activation = Activation::GeLU;
  else
    throw std::invalid_argument("checkpoint: unknown activation " + act);
  c.n_outputs = j.at("n_outputs").get<std::size_t>();
  c.dropout_enabled = j.at("dropout_enabled").get<bool>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.validate();
  return c;
}

}  // namespace detail

inline nlohmann::json checkpoint_to_json(const TrainedQuantileModel& tm) {
  nlohmann::json j;
  j["format_version"] = kCheckpointVersion;
  j["method"] = method_name(tm.method);
  j["grid"] = tm.grid.levels;
  j["standardized"] = tm.standardized;
  j["scaler"] = {{"mean", tm.scaler.mean}, {"std", tm.scaler.std}};
  j["models"] = nlohmann::json::array();
  for (const auto& m : tm.models)
    j["models"].push_back({{"config", detail::net_config_to_json(m.config)}, {"params", m.flat_params()}});
  return j;
}

inline TrainedQuantileModel checkpoint_from_json(const nlohmann::json& j) {
  const int ver = j.at("format_version").get<int>();
  if (ver != kCheckpointVersion)
    throw std::invalid_argument("checkpoint: unsupported format version " + std::to_string(ver));
  TrainedQuantileModel tm;
  tm.method = method_from_name(j.at("method").get<std::string>());
  tm.grid.levels = j.at("grid").get<std::vector<double>>();
  tm.grid.validate();
  tm.standardized = j.at("standardized").get<bool>();
  tm.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
  tm.scaler.std = j.at("scaler").at("std").get<std::vector<double>>();
  for (const auto& jm : j.at("models")) {
    MlpModel m = init_model(detail::net_config_from_json(jm.at("config")), 0);
    m.set_flat_params(jm.at("params").get<std::vector<double>>());
    tm.models.push_back(std::move(m));
  }
  if (tm.models.empty()) throw std::invalid_argument("checkpoint: no models");
  return tm;
}

inline void save_checkpoint(const TrainedQuantileModel& tm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  out << checkpoint_to_json(tm).dump(2) << '\n';
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

inline TrainedQuantileModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint: invalid JSON in " + path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace cqr

#endif  // CQR_CHECKPOINT_HPP
