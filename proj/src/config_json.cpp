#include "wigner/config_json.hpp"

#include <fstream>

namespace wigner::io {

namespace {

using nlohmann::json;

// Errors carry the JSON pointer of the offending key, e.g. "config /grid/2".
void require_kind(const std::string& pointer, const char* kind, bool ok) {
  if (!ok) {
    throw mc::ConfigError("config " + pointer + ": must be " + kind);
  }
}

std::uint64_t as_u64(const json& value, const std::string& pointer) {
  require_kind(pointer, "a non-negative integer",
               value.is_number_unsigned() ||
                   (value.is_number_integer() && value.get<long long>() >= 0));
  return value.get<std::uint64_t>();
}

double as_number(const json& value, const std::string& pointer) {
  require_kind(pointer, "a number", value.is_number());
  return value.get<double>();
}

}  // namespace

mc::ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw mc::ConfigError("config: must be a JSON object");
  mc::ExperimentConfig config;
  for (const auto& [key, value] : j.items()) {
    const std::string pointer = "/" + key;
    if (key == "n") {
      config.n = static_cast<std::size_t>(as_u64(value, pointer));
    } else if (key == "samples") {
      config.n_samples = static_cast<std::size_t>(as_u64(value, pointer));
    } else if (key == "seed") {
      config.master_seed = as_u64(value, pointer);
    } else if (key == "energy") {
      config.energy = as_number(value, pointer);
    } else if (key == "family") {
      require_kind(pointer, "a string", value.is_string());
      config.entry_spec.family = ensemble::parse_family(value.get<std::string>());
    } else if (key == "diagonal") {
      require_kind(pointer, "a string", value.is_string());
      config.entry_spec.diagonal = ensemble::parse_diagonal(value.get<std::string>());
    } else if (key == "grid") {
      require_kind(pointer, "an array of numbers", value.is_array());
      config.grid.clear();
      for (std::size_t idx = 0; idx < value.size(); ++idx) {
        config.grid.push_back(as_number(value[idx], pointer + "/" + std::to_string(idx)));
      }
    } else if (key == "k") {
      config.repulsion_order = static_cast<int>(as_u64(value, pointer));
    } else if (key == "p") {
      config.p_norm = as_number(value, pointer);
    } else if (key == "delta") {
      config.delta = as_number(value, pointer);
    } else if (key == "kappa") {
      config.kappa = as_number(value, pointer);
    } else if (key == "workers") {
      config.workers = static_cast<std::size_t>(as_u64(value, pointer));
    } else {
      throw mc::ConfigError("config " + pointer + ": unknown key");
    }
  }
  return config;
}

json config_to_json(const mc::ExperimentConfig& config) {
  json j;
  j["n"] = config.n;
  j["samples"] = config.n_samples;
  j["seed"] = config.master_seed;
  j["energy"] = config.energy;
  j["family"] = ensemble::family_name(config.entry_spec.family);
  j["diagonal"] = ensemble::diagonal_name(config.entry_spec.diagonal);
  j["grid"] = config.grid;
  j["k"] = config.repulsion_order;
  j["p"] = config.p_norm;
  j["delta"] = config.delta;
  j["kappa"] = config.kappa;
  j["workers"] = config.workers;
  return j;
}

mc::ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mc::ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw mc::ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.at("config").is_object()) {
    return config_from_json(j.at("config"));
  }
  return config_from_json(j);
}

}  // namespace wigner::io
