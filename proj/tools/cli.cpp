#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "nngraph/analytic.hpp"
#include "nngraph/components.hpp"
#include "nngraph/format.hpp"
#include "nngraph/monte_carlo.hpp"
#include "nngraph/neighbor_index.hpp"
#include "nngraph/parallel.hpp"
#include "nngraph/point_cloud.hpp"
#include "nngraph/random_graphs.hpp"
#include "nngraph/sparse_graph.hpp"
#include "nngraph/spectral.hpp"
#include "run_config.hpp"

namespace nngraph::cli {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Session {
  RunConfig config;
  unsigned threads = default_thread_count();
  bool no_timestamp = false;
  bool quiet = false;
  bool dump_config = false;
};

/// What a subcommand produces: a primary CSV table, optional secondary
/// tables written next to it, and a JSON summary.
struct Result {
  std::string table;
  std::vector<std::pair<std::string, std::string>> extra_tables;  // file suffix, CSV
  json summary;
  std::string default_format = "json";
};

std::size_t as_count(double value, const char* name) {
  if (!(value >= 0.0 && value <= 4.0e9 && std::floor(value) == value))
    throw std::invalid_argument(std::string(name) + " must be a non-negative integer below 4e9");
  return static_cast<std::size_t>(value);
}

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buffer;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << content;
  if (!file) throw std::runtime_error("write failed for " + path);
}

// Point clouds, graphs and rules shared by several subcommands.

PointCloud load_cloud(const RunConfig& config) {
  std::ifstream probe(config.input, std::ios::binary);
  if (!probe) throw InputError("cannot open point file: " + config.input);
  try {
    return load_points(config.input, config.labels);
  } catch (const std::exception& e) {
    throw InputError("cannot read point file " + config.input + ": " + e.what());
  }
}

PointCloud make_cloud(const RunConfig& config) {
  if (!config.input.empty()) return load_cloud(config);
  const SeedSpec seed{config.master_seed, 0};
  if (config.dist == "uniform") return sample_uniform(as_count(config.n, "n"), config.d, seed);
  if (config.dist == "poisson") return sample_poisson_process(config.n, config.d, seed);
  if (config.dist == "spiral") {
    require(config.d == 2, "the spiral dataset is two-dimensional (d = 2)");
    return make_spiral_clusters(as_count(config.n, "n"), seed);
  }
  throw std::invalid_argument("unknown distribution '" + config.dist + "'");
}

SubsampleRule make_rule(const RunConfig& config) {
  SubsampleRule rule;
  if (config.rule == "knn") rule = KnnRule{config.k};
  else if (config.rule == "bernoulli") rule = BernoulliRule{config.K, config.p};
  else if (config.rule == "choose") rule = ChooseRule{config.k, config.K};
  else if (config.rule == "algorithm1") rule = Algorithm1Rule{config.k, config.K};
  else throw std::invalid_argument("unknown rule '" + config.rule + "'");
  validate(rule);
  return rule;
}

double theorem2_probability(double n) {
  require(n > std::exp(1.0), "n must exceed e for the default p = 3 ln ln n / ln n");
  return 3.0 * std::log(std::log(n)) / std::log(n);
}

void resolve_graph_defaults(RunConfig& config, const char* dist, const char* rule, std::size_t K) {
  if (config.n < 0) config.n = 10000;
  if (config.dist.empty()) config.dist = dist;
  if (config.rule.empty()) config.rule = rule;
  if (config.K == 0) config.K = K;
  if (config.rule == "bernoulli" && config.p < 0) config.p = theorem2_probability(config.n);
}

GridAdjacency parse_adjacency(const std::string& name) {
  if (name == "lattice") return GridAdjacency::lattice;
  if (name == "king") return GridAdjacency::king;
  throw std::invalid_argument("unknown adjacency '" + name + "' (lattice or king)");
}

json seed_json(const SeedSpec& seed) {
  return {{"master_seed", seed.master_seed}, {"stream_id", seed.stream_id}};
}

template <class Writer>
std::string render(Writer&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

// Subcommands.

Result run_sample(RunConfig& config, const Session&) {
  if (config.n < 0) config.n = 1000;
  if (config.dist.empty()) config.dist = "uniform";
  const PointCloud cloud = make_cloud(config);
  Result result;
  result.default_format = "csv";
  result.table = render([&](std::ostream& out) { write_points_csv(cloud, out); });
  result.summary = {{"points", cloud.size()}, {"dim", cloud.dim()}, {"labeled", cloud.has_labels()}};
  return result;
}

struct BuiltGraph {
  PointCloud cloud;
  SparseGraph graph;
  ComponentLabels labels;
  ComponentStats stats;
};

BuiltGraph build_from_config(const RunConfig& config, const Session& session) {
  BuiltGraph built{make_cloud(config), {}, {}, {}};
  const SubsampleRule rule = make_rule(config);
  const NeighborIndex index(built.cloud, config.periodic);
  built.graph = build_graph(index, rule, SeedSpec{config.master_seed, 1}, session.threads);
  built.labels = connected_components(built.graph);
  built.stats = component_stats(built.labels, built.cloud);
  return built;
}

Result run_knn_graph(RunConfig& config, const Session& session) {
  resolve_graph_defaults(config, "uniform", "knn", 35);
  const BuiltGraph built = build_from_config(config, session);
  Result result;
  result.default_format = "csv";
  result.table = render([&](std::ostream& out) { write_edge_list_csv(built.graph, out); });
  result.summary = {{"vertices", built.graph.num_vertices()},
                    {"edges", built.graph.num_edges()},
                    {"components", to_json(built.stats)}};
  return result;
}

Result run_components(RunConfig& config, const Session& session) {
  resolve_graph_defaults(config, "uniform", "knn", 35);
  const BuiltGraph built = build_from_config(config, session);
  Result result;
  std::ostringstream table;
  table << "component,size,diameter,diameter_is_bound\n";
  for (std::size_t c = 0; c < built.labels.num_components(); ++c)
    table << c << ',' << built.labels.sizes[c] << ',' << format_double(built.stats.diameters[c]) << ','
          << (built.stats.diameter_is_bound[c] ? 1 : 0) << '\n';
  result.table = table.str();
  result.summary = to_json(built.stats);
  result.summary["vertices"] = built.graph.num_vertices();
  result.summary["edges"] = built.graph.num_edges();
  return result;
}

Result run_estimate_ckd(RunConfig& config, const Session& session) {
  if (config.n < 0) config.n = 100000;
  require(config.n > 0, "intensity n must be positive");
  require(config.trials > 0, "trials must be positive");
  const RunOptions options{config.master_seed, session.threads};
  Result result;
  ExperimentSummary summary;
  json extra = json::object();
  if (config.metric == "cluster_constant") {
    summary = estimate_cluster_constant(config.d, config.k, config.n, config.trials, options);
  } else if (config.metric == "diameter") {
    summary = component_diameter_scaling(config.d, config.k, config.n, config.trials, options);
  } else if (config.metric == "knn_distance") {
    NeighborDistanceSample sample =
        knn_distance_experiment(config.d, config.k, config.n, config.periodic, config.trials, options);
    const NNDistanceLaw law(static_cast<unsigned>(config.k), config.d, config.n);
    extra["expected_distance"] = expected_knn_distance(law);
    extra["pooled_distances"] = sample.pooled_sorted.size();
    extra["ks_statistic"] =
        ks_statistic(sample.pooled_sorted, [&](double r) { return nn_distance_cdf(law, r); });
    summary = std::move(sample.mean_distance);
  } else {
    throw std::invalid_argument("unknown metric '" + config.metric +
                                "' (cluster_constant, diameter or knn_distance)");
  }
  result.table = render([&](std::ostream& out) { write_trials_csv(summary.reports, out); });
  result.summary = to_json(summary);
  result.summary.update(extra);
  return result;
}

Result run_theorem2_sweep(RunConfig& config, const Session& session) {
  if (config.n < 0) config.n = 100000;
  if (config.K == 0) config.K = 35;
  const std::size_t n = as_count(config.n, "n");
  if (config.K_values.empty()) config.K_values = {config.K};
  if (config.p_values.empty()) config.p_values = {config.p < 0 ? theorem2_probability(config.n) : config.p};
  require(config.trials > 0, "trials must be positive");
  const RunOptions options{config.master_seed, session.threads};
  const auto cells =
      giant_fraction_sweep(config.d, n, config.K_values, config.p_values, config.trials, options);
  Result result;
  std::vector<TrialReport> all;
  json cells_json = json::array();
  for (const auto& cell : cells) {
    all.insert(all.end(), cell.reports.begin(), cell.reports.end());
    json entry = to_json(cell);
    entry["trials_giant_at_least_0.95"] =
        std::count_if(cell.reports.begin(), cell.reports.end(), [](const TrialReport& r) { return r.value >= 0.95; });
    cells_json.push_back(std::move(entry));
  }
  result.table = render([&](std::ostream& out) { write_trials_csv(all, out); });
  result.summary = {{"cells", std::move(cells_json)}};
  return result;
}

Result connectivity_result(const GraphFamily& family, const RunConfig& config, const Session& session,
                           json bound) {
  require(config.trials > 0, "trials must be positive");
  const ExperimentSummary summary =
      connectivity_frequency(family, config.trials, RunOptions{config.master_seed, session.threads});
  Result result;
  result.table = render([&](std::ostream& out) { write_trials_csv(summary.reports, out); });
  result.summary = to_json(summary);
  std::size_t disconnected = 0;
  for (const auto& r : summary.reports) disconnected += r.value > 0.5;
  result.summary["disconnected"] = disconnected;
  result.summary["bound"] = std::move(bound);
  return result;
}

Result run_er_sim(RunConfig& config, const Session& session) {
  if (config.n < 0) config.n = 10000;
  const std::size_t n = as_count(config.n, "n");
  require(n >= 2, "n must be at least 2");
  if (config.p < 0) config.p = 10.0 * std::log(config.n) / config.n;
  require(config.p <= 1.0, "p must lie in [0, 1]");
  const DisconnectBound bound = er_disconnect_bound(n, config.p);
  return connectivity_result(ErFamily{n, config.p}, config, session,
                             {{"value", bound.bound}, {"in_regime", bound.in_regime}});
}

Result run_ulam_sim(RunConfig& config, const Session& session) {
  if (config.n < 0) config.n = 1000;
  const std::size_t n = as_count(config.n, "n");
  require(config.k >= 1 && config.k < n, "k must satisfy 1 <= k < n");
  json bound = nullptr;
  if (config.k >= 2) bound = {{"value", ulam_disconnect_bound(n, config.k)}, {"in_regime", true}};
  return connectivity_result(UlamFamily{n, config.k}, config, session, std::move(bound));
}

Result run_percolation(RunConfig& config, const Session& session) {
  if (config.adjacency.empty()) config.adjacency = "lattice";
  if (config.side == 0) config.side = 256;
  if (config.q_values.empty()) config.q_values = {config.q};
  require(config.trials > 0, "trials must be positive");
  const GridSpec spec{config.side, config.d, parse_adjacency(config.adjacency)};
  const std::size_t levels = config.q_values.size();
  std::vector<PercolationOutcome> outcomes(config.trials * levels);
  parallel_for(config.trials, session.threads, [&](std::size_t t) {
    const SeedSpec seed{config.master_seed, t};
    for (std::size_t j = 0; j < levels; ++j) outcomes[t * levels + j] = percolate_grid(spec, config.q_values[j], seed);
  });

  Result result;
  std::vector<TrialReport> all;
  json per_q = json::array();
  for (std::size_t j = 0; j < levels; ++j) {
    std::vector<TrialReport> reports;
    std::size_t above = 0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const auto& o = outcomes[t * levels + j];
      above += o.giant_fraction_of_occupied >= 0.99;
      reports.push_back({t, "giant_fraction", o.giant_fraction_of_occupied,
                         {{"q", config.q_values[j]},
                          {"occupied", o.occupied_count},
                          {"giant_size", o.giant_size},
                          {"seed", seed_json({config.master_seed, t})}}});
    }
    all.insert(all.end(), reports.begin(), reports.end());
    json entry = to_json(summarize("giant_fraction", std::move(reports), {{"q", config.q_values[j]}}));
    entry["trials_giant_at_least_0.99"] = above;
    per_q.push_back(std::move(entry));
  }

  // Coupled runs: the surviving sites shrink as q grows, so the giant cannot grow.
  std::vector<std::size_t> order(levels);
  for (std::size_t j = 0; j < levels; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return config.q_values[a] < config.q_values[b]; });
  bool monotone = true;
  for (std::size_t t = 0; t < config.trials; ++t)
    for (std::size_t j = 1; j < levels; ++j)
      monotone &= outcomes[t * levels + order[j]].giant_size <= outcomes[t * levels + order[j - 1]].giant_size;

  result.table = render([&](std::ostream& out) { write_trials_csv(all, out); });
  result.summary = {{"levels", std::move(per_q)}, {"giant_size_monotone_in_q", monotone}};
  return result;
}

Result run_animals(RunConfig& config, const Session&) {
  if (config.adjacency.empty()) config.adjacency = "king";
  if (config.side == 0) config.side = 20;
  require(config.ell >= 1 && config.ell <= kMaxAnimalSize,
          "ell must lie in [1, " + std::to_string(kMaxAnimalSize) + "]");
  const GridAdjacency adjacency = parse_adjacency(config.adjacency);
  Result result;
  result.default_format = "csv";
  std::ostringstream table;
  table << "size,count,bound,within_bound\n";
  json rows = json::array();
  bool all_within = true;
  const std::uint64_t sites = static_cast<std::uint64_t>(config.side) * config.side;
  for (std::size_t size = 1; size <= config.ell; ++size) {
    const std::uint64_t count = count_lattice_animals(config.side, config.d, size, adjacency);
    std::uint64_t bound = sites;
    for (std::size_t i = 0; i < size; ++i) bound *= 256;
    const bool within = count <= bound;
    all_within &= within;
    table << size << ',' << count << ',' << bound << ',' << (within ? 1 : 0) << '\n';
    rows.push_back({{"size", size}, {"count", count}, {"bound", bound}});
  }
  result.table = table.str();
  result.summary = {{"counts", std::move(rows)}, {"all_within_bound", all_within}};
  return result;
}

Result run_analytic_table(RunConfig& config, const Session&) {
  if (config.n < 0) config.n = 10000;
  require(config.n > 0, "intensity n must be positive");
  require(config.k >= 1, "k must be at least 1");
  require(config.table == "expected" || config.table == "pdf", "table must be 'expected' or 'pdf'");
  if (config.table == "pdf" && config.r_points == 0) config.r_points = 101;
  const NNDistanceLaw law(static_cast<unsigned>(config.k), config.d, config.n);
  const double expected = expected_knn_distance(law);

  std::ostringstream expected_table;
  expected_table << "k,d,n,expected_distance\n"
                 << config.k << ',' << config.d << ',' << format_double(config.n) << ','
                 << format_double(expected) << '\n';

  std::string pdf_table;
  if (config.r_points > 0) {
    require(config.r_points >= 2, "r_points must be at least 2");
    // Out to four times the radius holding k expected points, where F is within e^-16 of one for k = 1.
    const double scale =
        std::pow(static_cast<double>(config.k) / (unit_ball_volume(config.d) * config.n), 1.0 / config.d);
    const double r_max = 4.0 * scale;
    std::ostringstream out;
    out << "r,pdf,cdf\n";
    for (std::size_t i = 0; i < config.r_points; ++i) {
      const double r = r_max * static_cast<double>(i) / static_cast<double>(config.r_points - 1);
      out << format_double(r) << ',' << format_double(nn_distance_pdf(law, r)) << ','
          << format_double(nn_distance_cdf(law, r)) << '\n';
    }
    pdf_table = out.str();
  }

  Result result;
  result.default_format = "csv";
  if (config.table == "pdf") {
    result.table = pdf_table;
    result.extra_tables.emplace_back("expected", expected_table.str());
  } else {
    result.table = expected_table.str();
    if (!pdf_table.empty()) result.extra_tables.emplace_back("pdf", pdf_table);
  }
  result.summary = {{"k", config.k}, {"d", config.d}, {"n", config.n}, {"expected_distance", expected}};
  return result;
}

EigenMethod parse_method(const std::string& name) {
  if (name == "shift-invert") return EigenMethod::shift_invert;
  if (name == "lanczos") return EigenMethod::shifted_lanczos;
  throw std::invalid_argument("unknown method '" + name + "' (shift-invert or lanczos)");
}

Result run_spectral_embed(RunConfig& config, const Session& session) {
  if (config.n < 0) config.n = 16000;
  if (config.dist.empty()) config.dist = "spiral";
  if (config.rule.empty()) config.rule = "choose";
  if (config.K == 0) config.K = 7;
  if (config.rule == "bernoulli" && config.p < 0) config.p = theorem2_probability(config.n);
  require(config.tol > 0, "tol must be positive");
  const EigenMethod method = parse_method(config.method);
  const PointCloud cloud = make_cloud(config);
  const SubsampleRule rule = make_rule(config);
  require(config.dims >= 1 && config.dims <= cloud.size(), "dims must lie in [1, number of points]");
  require(config.bandwidth_rank >= 1 && config.bandwidth_rank < cloud.size(),
          "bandwidth_rank must lie in [1, number of points)");

  const SpectralEmbedding embedding =
      spectral_embed(cloud, rule, config.bandwidth_rank, config.dims, config.tol,
                     SeedSpec{config.master_seed, 1}, config.max_iter, session.threads, method);

  Result result;
  result.default_format = "csv";
  result.table = render([&](std::ostream& out) { write_matrix_csv(embedding.coordinates, out); });
  const Eigen::Map<const Eigen::MatrixXd> values(embedding.eigen.eigenvalues.data(),
                                                 static_cast<Eigen::Index>(embedding.eigen.eigenvalues.size()), 1);
  result.extra_tables.emplace_back("eigenvalues", render([&](std::ostream& out) { write_matrix_csv(values, out); }));
  result.summary = {{"points", cloud.size()},
                    {"edges", embedding.graph.num_edges()},
                    {"graph_components", connected_components(embedding.graph).num_components()},
                    {"eigenvalues", embedding.eigen.eigenvalues},
                    {"residuals", embedding.eigen.residuals},
                    {"iterations", embedding.eigen.iterations}};
  if (cloud.has_labels()) {
    const int groups = *std::max_element(cloud.labels().begin(), cloud.labels().end()) + 1;
    require(*std::min_element(cloud.labels().begin(), cloud.labels().end()) >= 0, "labels must be non-negative");
    result.summary["nearest_centroid_accuracy"] =
        nearest_centroid_accuracy(embedding.coordinates, cloud.labels(), groups);
  }
  return result;
}

Result run_algorithm1(RunConfig& config, const Session& session) {
  resolve_graph_defaults(config, "uniform", "algorithm1", 35);
  const PointCloud cloud = make_cloud(config);
  validate(Algorithm1Rule{config.k, config.K});
  const SeedSpec seed{config.master_seed, 1};
  const NearSubsetResult near = algorithm1_near_subset(cloud, config.k, config.K, seed, session.threads);
  const SparseGraph graph = build_algorithm1_graph(cloud, config.k, config.K, seed, session.threads);
  const ComponentLabels labels = connected_components(graph);
  Result result;
  result.default_format = "csv";
  result.table = render([&](std::ostream& out) { write_neighbor_rows_csv(near.rows, out); });
  result.summary = {{"points", cloud.size()},
                    {"subset_size", near.subset.size()},
                    {"edges", graph.num_edges()},
                    {"components", to_json(component_stats(labels, cloud))}};
  return result;
}

using Handler = std::function<Result(RunConfig&, const Session&)>;

void emit(const Session& session, const RunConfig& config, const Result& result, std::ostream& out) {
  json doc = {{"tool", "nngraph"}, {"version", kVersion}, {"config", config}, {"summary", result.summary}};
  if (!session.no_timestamp) doc["created"] = utc_timestamp();
  const std::string document = doc.dump(2) + "\n";

  const std::string format = config.format.empty() ? result.default_format : config.format;
  require(format == "csv" || format == "json", "format must be 'csv' or 'json'");
  if (!config.output.empty()) {
    write_file(config.output + ".csv", result.table);
    for (const auto& [suffix, table] : result.extra_tables)
      write_file(config.output + "." + suffix + ".csv", table);
    write_file(config.output + ".json", document);
    out << document;
    return;
  }
  out << (format == "csv" ? result.table : document);
}

// Everything after "--config PATH" is overlaid on the file's contents, so
// explicit flags win over the file and the file wins over built-in defaults.
std::vector<std::string> extract_config_path(std::vector<std::string> args, std::string& path) {
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config requires a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  return rest;
}

std::uint64_t env_seed() {
  const char* text = std::getenv("NNGRAPH_SEED");
  if (text == nullptr || *text == '\0') return 0;
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || text[used] != '\0' || text[0] == '-')
    throw std::invalid_argument(std::string("NNGRAPH_SEED is not an unsigned integer: '") + text + "'");
  return value;
}

int run_checked(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Session session;
  RunConfig& config = session.config;
  config.master_seed = env_seed();
  std::string config_path;
  std::vector<std::string> args = extract_config_path(raw_args, config_path);
  if (!config_path.empty()) load_config(config_path, config);

  CLI::App app{"Nearest-neighbor graph experiments"};
  app.name("nngraph");
  app.set_version_flag("--version", kVersion);
  app.footer("Any subcommand also accepts --config FILE (JSON, as printed by --dump-config);\n"
             "flags given on the command line override the file. NNGRAPH_SEED supplies the\n"
             "master seed when --seed is absent.");
  app.require_subcommand(0, 1);

  std::map<std::string, Handler> handlers;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", config.master_seed, "Master seed");
    sub->add_option("--output", config.output, "Output prefix; writes PREFIX.csv and PREFIX.json");
    sub->add_option("--format", config.format, "Standard output format without --output: csv or json");
    sub->add_option("--threads", session.threads, "Worker threads (default: all cores)");
    sub->add_flag("--no-timestamp", session.no_timestamp, "Omit the creation time from metadata");
    sub->add_flag("--quiet", session.quiet, "No progress messages");
    sub->add_flag("--dump-config", session.dump_config, "Print the resolved config as JSON and exit");
  };
  auto add_cloud = [&](CLI::App* sub) {
    sub->add_option("--n", config.n, "Number of points (Poisson: intensity)");
    sub->add_option("--d", config.d, "Dimension");
    sub->add_option("--dist", config.dist, "uniform, poisson or spiral");
    sub->add_option("--input", config.input, "Point file (CSV or PTS1 binary) instead of sampling");
    sub->add_flag("--labels", config.labels, "Point CSV has a trailing integer label column");
  };
  auto add_rule = [&](CLI::App* sub) {
    sub->add_option("--rule", config.rule, "knn, bernoulli, choose or algorithm1");
    sub->add_option("--k", config.k, "Neighbors per point");
    sub->add_option("--K", config.K, "Candidate neighbors per point");
    sub->add_option("--p", config.p, "Bernoulli keep probability");
  };
  auto command = [&](const std::string& name, const std::string& help, Handler handler) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    handlers[name] = std::move(handler);
    return sub;
  };

  {
    auto* sub = command("sample", "Sample a point cloud and print it as CSV", run_sample);
    add_cloud(sub);
  }
  {
    auto* sub = command("knn-graph", "Build a neighbor graph and print its edge list", run_knn_graph);
    add_cloud(sub);
    add_rule(sub);
    sub->add_flag("--periodic", config.periodic, "Torus metric");
  }
  {
    auto* sub = command("components", "Connected components of a neighbor graph", run_components);
    add_cloud(sub);
    add_rule(sub);
    sub->add_flag("--periodic", config.periodic, "Torus metric");
  }
  {
    auto* sub = command("estimate-ckd", "Components per unit intensity of the k-NN graph", run_estimate_ckd);
    sub->add_option("--n", config.n, "Poisson intensity");
    sub->add_option("--d", config.d, "Dimension");
    sub->add_option("--k", config.k, "Neighbors per point");
    sub->add_option("--trials", config.trials, "Number of trials");
    sub->add_option("--metric", config.metric, "cluster_constant, diameter or knn_distance");
    sub->add_flag("--periodic", config.periodic, "Torus metric (knn_distance only)");
  }
  {
    auto* sub = command("theorem2-sweep", "Giant fraction of Bernoulli-subsampled K-NN graphs", run_theorem2_sweep);
    sub->add_option("--n", config.n, "Number of uniform points");
    sub->add_option("--d", config.d, "Dimension");
    sub->add_option("--K", config.K, "Candidate neighbors (single value)");
    sub->add_option("--p", config.p, "Keep probability (default 3 ln ln n / ln n)");
    sub->add_option("--K-values", config.K_values, "List of K")->delimiter(',');
    sub->add_option("--p-values", config.p_values, "List of p")->delimiter(',');
    sub->add_option("--trials", config.trials, "Number of trials");
  }
  {
    auto* sub = command("er-sim", "Connectivity of Erdos-Renyi graphs", run_er_sim);
    sub->add_option("--n", config.n, "Vertices");
    sub->add_option("--p", config.p, "Edge probability (default 10 ln n / n)");
    sub->add_option("--trials", config.trials, "Number of samples");
  }
  {
    auto* sub = command("ulam-sim", "Connectivity of k-out random graphs", run_ulam_sim);
    sub->add_option("--n", config.n, "Vertices");
    sub->add_option("--k", config.k, "Out-degree");
    sub->add_option("--trials", config.trials, "Number of samples");
  }
  {
    auto* sub = command("percolation", "Site percolation on a grid", run_percolation);
    sub->add_option("--side", config.side, "Grid side (default 256)");
    sub->add_option("--d", config.d, "Dimension");
    sub->add_option("--q", config.q, "Removal probability");
    sub->add_option("--q-values", config.q_values, "List of removal probabilities, coupled per trial")
        ->delimiter(',');
    sub->add_option("--adjacency", config.adjacency, "lattice or king");
    sub->add_option("--trials", config.trials, "Number of trials");
  }
  {
    auto* sub = command("animals", "Count lattice animals up to size ell", run_animals);
    sub->add_option("--side", config.side, "Grid side (default 20)");
    sub->add_option("--d", config.d, "Dimension (2)");
    sub->add_option("--ell", config.ell, "Largest animal size");
    sub->add_option("--adjacency", config.adjacency, "lattice or king");
  }
  {
    auto* sub = command("analytic-table", "k-th nearest-neighbor distance law", run_analytic_table);
    sub->add_option("--n", config.n, "Poisson intensity");
    sub->add_option("--d", config.d, "Dimension");
    sub->add_option("--k", config.k, "Neighbor rank");
    sub->add_option("--table", config.table, "Table on standard output: expected or pdf");
    sub->add_option("--r-points", config.r_points, "Rows of the (r, pdf, cdf) table");
  }
  {
    auto* sub = command("spectral-embed", "Spectral embedding of a neighbor graph", run_spectral_embed);
    add_cloud(sub);
    add_rule(sub);
    sub->add_option("--bandwidth-rank", config.bandwidth_rank, "Neighbor rank setting each point's bandwidth");
    sub->add_option("--dims", config.dims, "Number of eigenvectors");
    sub->add_option("--tol", config.tol, "Eigenpair residual tolerance");
    sub->add_option("--max-iter", config.max_iter, "Iteration cap (0: 50 dims + 200)");
    sub->add_option("--method", config.method, "shift-invert or lanczos");
  }
  {
    auto* sub = command("algorithm1", "Nearest members of a random subset", run_algorithm1);
    add_cloud(sub);
    sub->add_option("--k", config.k, "Neighbors per point");
    sub->add_option("--K", config.K, "Subset size is floor(k n / K)");
  }

  if (!config.subcommand.empty()) {
    const bool named = std::any_of(args.begin(), args.end(), [&](const std::string& a) { return handlers.count(a) > 0; });
    if (!named) args.insert(args.begin(), config.subcommand);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const auto chosen = app.get_subcommands();
  if (chosen.empty()) {
    err << app.help();
    return kExitUsage;
  }
  const std::string name = chosen.front()->get_name();
  if (!config.subcommand.empty() && config.subcommand != name)
    throw ConfigError("config file is for '" + config.subcommand + "', not '" + name + "'");
  config.subcommand = name;
  require(session.threads >= 1, "threads must be at least 1");
  // Negative n and p in a config file mean "use the default"; on the command line they are errors.
  for (const char* flag : {"--n", "--p"}) {
    const CLI::Option* option = chosen.front()->get_option_no_throw(flag);
    if (option != nullptr && option->count() > 0)
      require(option->as<double>() >= 0.0, std::string(flag + 2) + " must be non-negative");
  }

  if (session.dump_config) {
    out << json(config).dump(2) << '\n';
    return kExitOk;
  }

  if (!session.quiet) err << "[" << name << "] started\n";
  const auto start = std::chrono::steady_clock::now();
  const Result result = handlers.at(name)(config, session);
  emit(session, config, result, out);
  if (!session.quiet) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "[" << name << "] finished in " << std::fixed << std::setprecision(2) << seconds << " s\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_checked(args, out, err);
  } catch (const InputError& e) {
    err << "nngraph: error: " << e.what() << '\n';
    return kExitUnreadableInput;
  } catch (const ConfigError& e) {
    err << "nngraph: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    err << "nngraph: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "nngraph: error: " << e.what() << '\n';
    return kExitInvalidRange;
  } catch (const std::out_of_range& e) {
    err << "nngraph: error: " << e.what() << '\n';
    return kExitInvalidRange;
  } catch (const std::exception& e) {
    err << "nngraph: error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace nngraph::cli
