#include "nngraph/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "nngraph/components.hpp"
#include "nngraph/format.hpp"
#include "nngraph/neighbor_index.hpp"
#include "nngraph/point_cloud.hpp"
#include "nngraph/random_graphs.hpp"
#include "nngraph/sparse_graph.hpp"

namespace nngraph {

namespace {

nlohmann::json seed_json(const RunOptions& options, std::size_t trial) {
  return {{"master_seed", options.master_seed}, {"stream_id", trial}};
}

void require_trials(std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("at least one trial is required");
}

// Poisson cloud, k-NN graph and its component labels for one trial.
struct ClusterTrial {
  PointCloud cloud;
  ComponentLabels labels;
};

ClusterTrial cluster_trial(unsigned d, std::size_t k, double intensity, const SeedSpec& seed) {
  ClusterTrial out{sample_poisson_process(intensity, d, seed.child(0)), {}};
  if (out.cloud.empty()) return out;
  const NeighborIndex index(out.cloud, false);
  out.labels = connected_components(build_knn_graph(index, k));
  return out;
}

}  // namespace

ExperimentSummary summarize(std::string metric, std::vector<TrialReport> reports,
                            nlohmann::json config) {
  std::sort(reports.begin(), reports.end(),
            [](const TrialReport& a, const TrialReport& b) { return a.trial_id < b.trial_id; });
  ExperimentSummary s;
  s.metric = std::move(metric);
  s.trials = reports.size();
  s.config = std::move(config);
  if (!reports.empty()) {
    double sum = 0.0;
    for (const auto& r : reports) sum += r.value;
    s.mean = sum / static_cast<double>(reports.size());
    if (reports.size() > 1) {
      double ss = 0.0;
      for (const auto& r : reports) ss += (r.value - s.mean) * (r.value - s.mean);
      const double sd = std::sqrt(ss / static_cast<double>(reports.size() - 1));
      s.std_error = sd / std::sqrt(static_cast<double>(reports.size()));
    }
  }
  s.reports = std::move(reports);
  return s;
}

nlohmann::json to_json(const ExperimentSummary& summary) {
  return {{"metric", summary.metric},
          {"mean", summary.mean},
          {"std_error", summary.std_error},
          {"trials", summary.trials},
          {"config", summary.config}};
}

void write_trials_csv(const std::vector<TrialReport>& reports, std::ostream& out) {
  if (reports.empty()) return;
  // Nested metadata objects become dotted columns ("seed.stream_id").
  auto columns = [](const nlohmann::json& metadata) {
    return metadata.flatten();
  };
  auto render = [](const nlohmann::json& v) -> std::string {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  auto column_name = [](std::string pointer) {
    pointer.erase(0, 1);
    std::replace(pointer.begin(), pointer.end(), '/', '.');
    return pointer;
  };
  const auto header = columns(reports.front().metadata);
  out << "trial_id," << reports.front().metric;
  for (const auto& item : header.items()) out << ',' << column_name(item.key());
  out << '\n';
  for (const auto& r : reports) {
    const auto flat = columns(r.metadata);
    out << r.trial_id << ',' << format_double(r.value);
    for (const auto& item : header.items())
      out << ',' << (flat.contains(item.key()) ? render(flat[item.key()]) : "");
    out << '\n';
  }
}

ExperimentSummary estimate_cluster_constant(unsigned d, std::size_t k, double intensity,
                                            std::size_t trials, const RunOptions& options) {
  require_trials(trials);
  auto reports = run_trials(trials, options.threads, [&](std::size_t t) {
    const auto trial = cluster_trial(d, k, intensity, trial_seed(options, t));
    const std::size_t components = trial.labels.num_components();
    return TrialReport{t, "components_per_intensity", static_cast<double>(components) / intensity,
                       {{"d", d}, {"k", k}, {"intensity", intensity}, {"points", trial.cloud.size()},
                        {"components", components}, {"seed", seed_json(options, t)}}};
  });
  return summarize("components_per_intensity", std::move(reports),
                   {{"experiment", "estimate-ckd"}, {"d", d}, {"k", k}, {"intensity", intensity},
                    {"trials", trials}, {"master_seed", options.master_seed}});
}

ExperimentSummary component_diameter_scaling(unsigned d, std::size_t k, double intensity,
                                             std::size_t trials, const RunOptions& options) {
  require_trials(trials);
  auto reports = run_trials(trials, options.threads, [&](std::size_t t) {
    const auto trial = cluster_trial(d, k, intensity, trial_seed(options, t));
    double mean_diameter = 0.0;
    bool approximate = false;
    if (!trial.cloud.empty()) {
      const auto stats = component_stats(trial.labels, trial.cloud);
      mean_diameter = stats.diameter_mean();
      approximate = stats.approximate;
    }
    return TrialReport{t, "scaled_mean_diameter", mean_diameter * std::pow(intensity, 1.0 / d),
                       {{"d", d}, {"k", k}, {"intensity", intensity}, {"mean_diameter", mean_diameter},
                        {"approx_flag", approximate}, {"seed", seed_json(options, t)}}};
  });
  return summarize("scaled_mean_diameter", std::move(reports),
                   {{"experiment", "component-diameter"}, {"d", d}, {"k", k},
                    {"intensity", intensity}, {"trials", trials},
                    {"master_seed", options.master_seed}});
}

NeighborDistanceSample knn_distance_experiment(unsigned d, std::size_t k, double intensity,
                                               bool periodic, std::size_t trials,
                                               const RunOptions& options) {
  require_trials(trials);
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  std::vector<std::vector<double>> per_trial(trials);
  auto reports = run_trials(trials, options.threads, [&](std::size_t t) {
    const PointCloud cloud = sample_poisson_process(intensity, d, trial_seed(options, t).child(0));
    auto& distances = per_trial[t];
    if (cloud.size() > k) {
      const NeighborIndex index(cloud, periodic);
      const KnnTable table = index.knn_all(k);
      distances.reserve(table.rows());
      for (std::size_t i = 0; i < table.rows(); ++i) distances.push_back(table.row_distances(i).back());
    }
    const double mean = distances.empty()
                            ? 0.0
                            : std::accumulate(distances.begin(), distances.end(), 0.0) /
                                  static_cast<double>(distances.size());
    return TrialReport{t, "mean_knn_distance", mean,
                       {{"d", d}, {"k", k}, {"intensity", intensity}, {"periodic", periodic},
                        {"points", cloud.size()}, {"seed", seed_json(options, t)}}};
  });
  NeighborDistanceSample out;
  for (const auto& v : per_trial) out.pooled_sorted.insert(out.pooled_sorted.end(), v.begin(), v.end());
  std::sort(out.pooled_sorted.begin(), out.pooled_sorted.end());
  out.mean_distance = summarize("mean_knn_distance", std::move(reports),
                                {{"experiment", "knn-distance"}, {"d", d}, {"k", k},
                                 {"intensity", intensity}, {"periodic", periodic},
                                 {"trials", trials}, {"master_seed", options.master_seed}});
  return out;
}

std::vector<ExperimentSummary> giant_fraction_sweep(unsigned d, std::size_t n,
                                                    const std::vector<std::size_t>& K_values,
                                                    const std::vector<double>& p_values,
                                                    std::size_t trials, const RunOptions& options) {
  require_trials(trials);
  if (n == 0) throw std::invalid_argument("n must be positive");
  for (std::size_t K : K_values)
    for (double p : p_values) validate(BernoulliRule{K, p});
  const std::size_t cells = K_values.size() * p_values.size();

  std::vector<std::vector<TrialReport>> by_cell(cells, std::vector<TrialReport>(trials));
  parallel_for(trials, options.threads, [&](std::size_t t) {
    const SeedSpec seed = trial_seed(options, t);
    const NeighborIndex index(sample_uniform(n, d, seed.child(0)), false);
    for (std::size_t a = 0; a < K_values.size(); ++a) {
      const KnnTable table = index.knn_all(K_values[a]);
      for (std::size_t b = 0; b < p_values.size(); ++b) {
        const auto labels = connected_components(bernoulli_subsample(table, p_values[b], seed.child(1)));
        const double fraction = static_cast<double>(labels.giant_size()) / static_cast<double>(n);
        by_cell[a * p_values.size() + b][t] =
            TrialReport{t, "giant_fraction", fraction,
                        {{"d", d}, {"n", n}, {"K", K_values[a]}, {"p", p_values[b]},
                         {"giant_size", labels.giant_size()},
                         {"components", labels.num_components()}, {"seed", seed_json(options, t)}}};
      }
    }
  });

  std::vector<ExperimentSummary> out;
  out.reserve(cells);
  for (std::size_t a = 0; a < K_values.size(); ++a)
    for (std::size_t b = 0; b < p_values.size(); ++b)
      out.push_back(summarize("giant_fraction", std::move(by_cell[a * p_values.size() + b]),
                              {{"experiment", "theorem2-sweep"}, {"d", d}, {"n", n},
                               {"K", K_values[a]}, {"p", p_values[b]}, {"trials", trials},
                               {"master_seed", options.master_seed}}));
  return out;
}

ExperimentSummary isolated_vertex_rate(unsigned d, std::size_t n, std::size_t K, double p,
                                       std::size_t trials, const RunOptions& options) {
  require_trials(trials);
  if (n == 0) throw std::invalid_argument("n must be positive");
  validate(BernoulliRule{K, p});
  auto reports = run_trials(trials, options.threads, [&](std::size_t t) {
    const SeedSpec seed = trial_seed(options, t);
    const NeighborIndex index(sample_uniform(n, d, seed.child(0)), false);
    const SparseGraph graph = build_bernoulli_graph(index, K, p, seed.child(1));
    std::size_t isolated = 0;
    for (std::size_t v = 0; v < n; ++v) isolated += graph.degree(v) == 0;
    return TrialReport{t, "isolated_fraction", static_cast<double>(isolated) / static_cast<double>(n),
                       {{"d", d}, {"n", n}, {"K", K}, {"p", p}, {"isolated", isolated},
                        {"seed", seed_json(options, t)}}};
  });
  return summarize("isolated_fraction", std::move(reports),
                   {{"experiment", "isolated-rate"}, {"d", d}, {"n", n}, {"K", K}, {"p", p},
                    {"trials", trials}, {"master_seed", options.master_seed}});
}

CubeOccupancySummary cube_occupancy_check(unsigned d, std::size_t n, double c, std::size_t trials,
                                          const RunOptions& options) {
  require_trials(trials);
  if (!(c > 0.0)) throw std::invalid_argument("cube scale constant must be positive");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  const double log_n = std::log(static_cast<double>(n));
  CubeOccupancySummary out;
  out.cubes_per_axis = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n) / (c * log_n), 1.0 / d))));
  out.lower_bound = log_n / 100.0;
  out.upper_bound = 10.0 * c * log_n;
  out.config = {{"experiment", "cube-occupancy"}, {"d", d}, {"n", n}, {"c", c},
                {"trials", trials}, {"master_seed", options.master_seed}};
  out.min_counts.resize(trials);
  out.max_counts.resize(trials);

  const std::size_t g = out.cubes_per_axis;
  std::size_t cubes = 1;
  for (unsigned a = 0; a < d; ++a) cubes *= g;
  parallel_for(trials, options.threads, [&](std::size_t t) {
    const PointCloud cloud = sample_uniform(n, d, trial_seed(options, t).child(0));
    std::vector<std::size_t> count(cubes, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t cell = 0, stride = 1;
      for (unsigned a = 0; a < d; ++a, stride *= g)
        cell += std::min(g - 1, static_cast<std::size_t>(cloud.coord(i, a) * static_cast<double>(g))) * stride;
      ++count[cell];
    }
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    out.min_counts[t] = *lo;
    out.max_counts[t] = *hi;
  });
  for (std::size_t t = 0; t < trials; ++t)
    out.trials_within_bounds += static_cast<double>(out.min_counts[t]) >= out.lower_bound &&
                                static_cast<double>(out.max_counts[t]) <= out.upper_bound;
  return out;
}

ExperimentSummary connectivity_frequency(const GraphFamily& family, std::size_t trials,
                                         const RunOptions& options) {
  require_trials(trials);
  nlohmann::json params = std::visit(
      [](const auto& f) -> nlohmann::json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ErFamily>) return {{"family", "er"}, {"n", f.n}, {"p", f.p}};
        else return {{"family", "ulam"}, {"n", f.n}, {"k", f.k}};
      },
      family);
  auto reports = run_trials(trials, options.threads, [&](std::size_t t) {
    const SeedSpec seed = trial_seed(options, t);
    const SparseGraph graph = std::visit(
        [&](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, ErFamily>) return sample_er(f.n, f.p, seed);
          else return sample_ulam(f.n, f.k, seed);
        },
        family);
    nlohmann::json metadata = params;
    metadata["seed"] = seed_json(options, t);
    return TrialReport{t, "disconnected", is_connected(graph) ? 0.0 : 1.0, std::move(metadata)};
  });
  nlohmann::json config = params;
  config["experiment"] = "connectivity";
  config["trials"] = trials;
  config["master_seed"] = options.master_seed;
  return summarize("disconnected", std::move(reports), std::move(config));
}

}  // namespace nngraph
