#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "nngraph/parallel.hpp"
#include "nngraph/seed.hpp"

namespace nngraph {

/// One Monte Carlo trial's measured value.
struct TrialReport {
  std::size_t trial_id = 0;
  std::string metric;
  double value = 0.0;
  nlohmann::json metadata;  // parameters of this trial (n, d, k, K, p, seed, ...)
};

struct ExperimentSummary {
  std::string metric;
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(trials)
  std::size_t trials = 0;
  nlohmann::json config;
  std::vector<TrialReport> reports;  // sorted by trial_id
};

/// Reduces reports in trial_id order, so the result is independent of the
/// order in which trials finished.
ExperimentSummary summarize(std::string metric, std::vector<TrialReport> reports,
                            nlohmann::json config);

nlohmann::json to_json(const ExperimentSummary& summary);

/// CSV with header "trial_id,<metric>,<metadata keys...>" and one row per trial.
void write_trials_csv(const std::vector<TrialReport>& reports, std::ostream& out);

/// Shared knobs for every experiment.
struct RunOptions {
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
};

/// Trial t draws its randomness from SeedSpec{master_seed, t}.
inline SeedSpec trial_seed(const RunOptions& options, std::size_t trial) {
  return {options.master_seed, trial};
}

/// Runs trial(t) -> TrialReport for t in [0, trials) in parallel; output is
/// indexed by trial id.
template <class Trial>
std::vector<TrialReport> run_trials(std::size_t trials, unsigned threads, Trial&& trial) {
  std::vector<TrialReport> reports(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    reports[t] = trial(t);
    reports[t].trial_id = t;
  });
  return reports;
}

/// Components per unit intensity, X / n, of the k-NN graph on an intensity-n
/// Poisson process in [0,1]^d.
ExperimentSummary estimate_cluster_constant(unsigned d, std::size_t k, double intensity,
                                            std::size_t trials, const RunOptions& options);

/// Mean Euclidean component diameter of the same graphs, scaled by n^{1/d}.
ExperimentSummary component_diameter_scaling(unsigned d, std::size_t k, double intensity,
                                             std::size_t trials, const RunOptions& options);

/// Distances from every point to its k-th nearest neighbor on an
/// intensity-n Poisson process (optionally on the torus), pooled over trials.
struct NeighborDistanceSample {
  ExperimentSummary mean_distance;   // per-trial mean k-th NN distance
  std::vector<double> pooled_sorted; // all k-th NN distances, ascending
};
NeighborDistanceSample knn_distance_experiment(unsigned d, std::size_t k, double intensity,
                                               bool periodic, std::size_t trials,
                                               const RunOptions& options);

/// Giant-component fraction of the Bernoulli-subsampled K-NN graph on n
/// uniform points for each (K, p) cell. Cells share per-trial clouds and
/// seeds, so results are coupled across p.
std::vector<ExperimentSummary> giant_fraction_sweep(unsigned d, std::size_t n,
                                                    const std::vector<std::size_t>& K_values,
                                                    const std::vector<double>& p_values,
                                                    std::size_t trials, const RunOptions& options);

/// Fraction of degree-zero vertices in the Bernoulli-subsampled graph.
ExperimentSummary isolated_vertex_rate(unsigned d, std::size_t n, std::size_t K, double p,
                                       std::size_t trials, const RunOptions& options);

struct CubeOccupancySummary {
  std::size_t cubes_per_axis = 0;
  double lower_bound = 0.0;  // ln(n) / 100
  double upper_bound = 0.0;  // 10 c ln(n)
  std::vector<std::size_t> min_counts;  // per trial
  std::vector<std::size_t> max_counts;  // per trial
  std::size_t trials_within_bounds = 0;
  nlohmann::json config;

  double fraction_within_bounds() const {
    return min_counts.empty() ? 0.0
                              : static_cast<double>(trials_within_bounds) / static_cast<double>(min_counts.size());
  }
};

/// Splits [0,1]^d into equal cubes of volume about c ln(n) / n and checks
/// that every cube holds between ln(n)/100 and 10 c ln(n) of n uniform points.
CubeOccupancySummary cube_occupancy_check(unsigned d, std::size_t n, double c, std::size_t trials,
                                          const RunOptions& options);

struct ErFamily {
  std::size_t n;
  double p;
};
struct UlamFamily {
  std::size_t n, k;
};
using GraphFamily = std::variant<ErFamily, UlamFamily>;

/// Fraction of sampled graphs that are disconnected.
ExperimentSummary connectivity_frequency(const GraphFamily& family, std::size_t trials,
                                         const RunOptions& options);

}  // namespace nngraph
