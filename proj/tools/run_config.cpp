#include "run_config.hpp"

#include <fstream>

namespace nngraph::cli {

#define NNGRAPH_CONFIG_FIELDS(X)                                                              \
  X(subcommand) X(n) X(d) X(k) X(K) X(p) X(q) X(trials) X(tol) X(side) X(ell) X(master_seed) \
  X(output) X(format) X(dist) X(input) X(labels) X(periodic) X(rule) X(bandwidth_rank)       \
  X(dims) X(method) X(max_iter) X(metric) X(adjacency) X(K_values) X(p_values) X(q_values)   \
  X(r_points) X(table)

void to_json(nlohmann::json& j, const RunConfig& config) {
  j = nlohmann::json::object();
#define WRITE_FIELD(name) j[#name] = config.name;
  NNGRAPH_CONFIG_FIELDS(WRITE_FIELD)
#undef WRITE_FIELD
}

void from_json(const nlohmann::json& j, RunConfig& config) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const nlohmann::json known = RunConfig{};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
#define READ_FIELD(name) \
  if (j.contains(#name)) j.at(#name).get_to(config.name);
    NNGRAPH_CONFIG_FIELDS(READ_FIELD)
#undef READ_FIELD
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

#undef NNGRAPH_CONFIG_FIELDS

void load_config(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config file " + path + " is not valid JSON: " + e.what());
  }
  from_json(j, config);
}

}  // namespace nngraph::cli
