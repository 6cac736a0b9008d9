#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace nngraph::cli {

/// Every parameter a subcommand can take. Serialized verbatim into the
/// metadata of each output, so a run can be repeated from its own output.
struct RunConfig {
  std::string subcommand;

  double n = -1.0;  // point count, or Poisson intensity; negative: the default
  unsigned d = 2;
  std::size_t k = 2;
  std::size_t K = 0;  // 0: the default
  double p = -1.0;   // negative: the subcommand's default
  double q = 0.05;
  std::size_t trials = 20;
  double tol = 1e-8;
  std::size_t side = 0;          // 0: the default
  std::size_t ell = 5;
  std::uint64_t master_seed = 0;

  std::string output;
  std::string format;  // csv or json; empty picks the subcommand's default

  std::string dist;        // uniform, poisson, spiral; empty picks the default
  std::string input;
  bool labels = false;
  bool periodic = false;
  std::string rule;        // knn, bernoulli, choose, algorithm1

  std::size_t bandwidth_rank = 7;
  std::size_t dims = 5;
  std::string method = "shift-invert";
  std::size_t max_iter = 0;

  std::string metric = "cluster_constant";
  std::string adjacency;   // lattice or king
  std::vector<std::size_t> K_values;
  std::vector<double> p_values;
  std::vector<double> q_values;
  std::size_t r_points = 0;
  std::string table = "expected";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

void to_json(nlohmann::json& j, const RunConfig& config);
/// Missing keys keep their defaults; unknown keys raise ConfigError.
void from_json(const nlohmann::json& j, RunConfig& config);

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Overlays the keys of a JSON config file onto `config`. Throws InputError
/// when the file cannot be read.
void load_config(const std::string& path, RunConfig& config);

class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nngraph::cli
