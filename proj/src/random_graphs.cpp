#include "nngraph/random_graphs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nngraph/components.hpp"

namespace nngraph {

SparseGraph sample_er(std::size_t n, double p, const SeedSpec& seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1]");
  std::vector<Edge> edges;
  if (n < 2 || p == 0.0) return SparseGraph::from_edges(n, std::move(edges));
  if (p == 1.0) {
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t v = 1; v < n; ++v)
      for (std::size_t w = 0; w < v; ++w)
        edges.push_back({static_cast<VertexId>(w), static_cast<VertexId>(v)});
    return SparseGraph::from_edges(n, std::move(edges));
  }

  // Batagelj-Brandes: walk the lower triangle (v, w), w < v, in row order,
  // jumping geometric gaps between successive edges.
  SplitMix64 gen(seed.derived());
  const double log_q = std::log1p(-p);
  const double expected = p * static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  edges.reserve(static_cast<std::size_t>(expected + 4.0 * std::sqrt(expected) + 16.0));
  std::uint64_t v = 1;
  std::uint64_t w = 0;
  bool first = true;
  for (;;) {
    const double u = bits_to_unit(gen());
    const double gap = std::floor(std::log1p(-u) / log_q);
    if (gap > 4e18) break;
    w += static_cast<std::uint64_t>(gap) + (first ? 0 : 1);
    first = false;
    while (v < n && w >= v) {
      w -= v;
      ++v;
    }
    if (v >= n) break;
    edges.push_back({static_cast<VertexId>(w), static_cast<VertexId>(v)});
  }
  return SparseGraph::from_edges(n, std::move(edges));
}

SparseGraph sample_ulam(std::size_t n, std::size_t k, const SeedSpec& seed) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (k >= n) throw std::invalid_argument("k must be smaller than n");
  SplitMix64 gen(seed.derived());
  std::vector<Edge> edges;
  edges.reserve(n * k);
  std::vector<std::size_t> picks;
  picks.reserve(k);
  const std::size_t others = n - 1;
  for (std::size_t i = 0; i < n; ++i) {
    // Floyd's sampling of k distinct values from [0, n-1), then skip over i.
    picks.clear();
    for (std::size_t j = others - k; j < others; ++j) {
      const std::size_t t = static_cast<std::size_t>(uniform_below(gen, j + 1));
      const bool seen = std::find(picks.begin(), picks.end(), t) != picks.end();
      picks.push_back(seen ? j : t);
    }
    for (std::size_t t : picks) {
      const std::size_t target = t >= i ? t + 1 : t;
      edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(target)});
    }
  }
  return SparseGraph::from_edges(n, std::move(edges));
}

bool is_connected(const SparseGraph& graph) {
  return connected_components(graph).num_components() == 1;
}

namespace {

std::size_t checked_site_count(const GridSpec& spec) {
  if (spec.side < 2) throw std::invalid_argument("grid side must be at least 2");
  if (spec.d < 1 || spec.d > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  std::size_t total = 1;
  for (unsigned a = 0; a < spec.d; ++a) total *= spec.side;
  return total;
}

// Offsets with a positive leading nonzero component; each undirected grid
// adjacency is visited exactly once from its lower endpoint.
std::vector<std::vector<int>> forward_offsets(unsigned d, GridAdjacency adjacency) {
  std::vector<std::vector<int>> out;
  if (adjacency == GridAdjacency::lattice) {
    for (unsigned a = 0; a < d; ++a) {
      std::vector<int> delta(d, 0);
      delta[a] = 1;
      out.push_back(delta);
    }
    return out;
  }
  std::size_t combos = 1;
  for (unsigned a = 0; a < d; ++a) combos *= 3;
  for (std::size_t code = 0; code < combos; ++code) {
    std::vector<int> delta(d);
    std::size_t c = code;
    for (unsigned a = 0; a < d; ++a, c /= 3) delta[a] = static_cast<int>(c % 3) - 1;
    auto lead = std::find_if(delta.rbegin(), delta.rend(), [](int x) { return x != 0; });
    if (lead != delta.rend() && *lead > 0) out.push_back(delta);
  }
  return out;
}

}  // namespace

PercolationOutcome percolate_grid(const GridSpec& spec, double q, const SeedSpec& seed) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("removal probability must lie in [0, 1)");
  const std::size_t sites = checked_site_count(spec);
  const std::uint64_t key = seed.derived();
  std::vector<unsigned char> occupied(sites);
  PercolationOutcome out;
  out.removal_prob = q;
  for (std::size_t s = 0; s < sites; ++s) {
    occupied[s] = hashed_uniform(key, s) >= q;
    out.occupied_count += occupied[s];
  }

  const auto offsets = forward_offsets(spec.d, spec.adjacency);
  const auto side = static_cast<long>(spec.side);
  DisjointSetForest forest(sites);
  std::vector<long> coord(spec.d);
  for (std::size_t s = 0; s < sites; ++s) {
    if (!occupied[s]) continue;
    std::size_t rest = s;
    for (unsigned a = 0; a < spec.d; ++a, rest /= spec.side) coord[a] = static_cast<long>(rest % spec.side);
    for (const auto& delta : offsets) {
      long target = 0;
      long stride = 1;
      bool inside = true;
      for (unsigned a = 0; a < spec.d; ++a, stride *= side) {
        const long c = coord[a] + delta[a];
        if (c < 0 || c >= side) {
          inside = false;
          break;
        }
        target += c * stride;
      }
      if (inside && occupied[static_cast<std::size_t>(target)]) forest.unite(s, static_cast<std::size_t>(target));
    }
  }

  std::vector<std::size_t> root_size(sites, 0);
  for (std::size_t s = 0; s < sites; ++s)
    if (occupied[s]) out.giant_size = std::max(out.giant_size, ++root_size[forest.find(s)]);
  out.giant_fraction_of_occupied =
      out.occupied_count == 0 ? 0.0
                              : static_cast<double>(out.giant_size) / static_cast<double>(out.occupied_count);
  return out;
}

namespace {

struct AnimalCounter {
  std::size_t side;
  std::size_t target;
  GridAdjacency adjacency;
  std::uint64_t count = 0;
  std::vector<std::size_t> subgraph;

  bool adjacent(std::size_t a, std::size_t b) const {
    const auto ax = static_cast<long>(a % side), ay = static_cast<long>(a / side);
    const auto bx = static_cast<long>(b % side), by = static_cast<long>(b / side);
    const long dx = std::abs(ax - bx), dy = std::abs(ay - by);
    if (adjacency == GridAdjacency::king) return std::max(dx, dy) == 1;
    return dx + dy == 1;
  }

  std::vector<std::size_t> neighbors(std::size_t a) const {
    std::vector<std::size_t> out;
    const auto x = static_cast<long>(a % side), y = static_cast<long>(a / side);
    const auto s = static_cast<long>(side);
    for (long dy = -1; dy <= 1; ++dy)
      for (long dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (adjacency == GridAdjacency::lattice && dx != 0 && dy != 0) continue;
        const long nx = x + dx, ny = y + dy;
        if (nx >= 0 && nx < s && ny >= 0 && ny < s) out.push_back(static_cast<std::size_t>(ny * s + nx));
      }
    return out;
  }

  // Enumerates each connected subset once, rooted at its smallest site:
  // extensions only add sites larger than the root that are not already in
  // or next to the current subset.
  void extend(std::vector<std::size_t> extension, std::size_t root) {
    if (subgraph.size() == target) {
      ++count;
      return;
    }
    while (!extension.empty()) {
      const std::size_t w = extension.back();
      extension.pop_back();
      std::vector<std::size_t> next = extension;
      for (std::size_t u : neighbors(w)) {
        if (u <= root) continue;
        const bool touches = std::any_of(subgraph.begin(), subgraph.end(), [&](std::size_t s) {
          return s == u || adjacent(s, u);
        });
        if (!touches && std::find(next.begin(), next.end(), u) == next.end()) next.push_back(u);
      }
      subgraph.push_back(w);
      extend(std::move(next), root);
      subgraph.pop_back();
    }
  }
};

}  // namespace

std::uint64_t count_lattice_animals(std::size_t side, unsigned d, std::size_t size,
                                    GridAdjacency adjacency) {
  if (d != 2) throw std::invalid_argument("lattice animal enumeration supports d = 2 only");
  if (size == 0) throw std::invalid_argument("animal size must be at least 1");
  if (size > kMaxAnimalSize) throw std::invalid_argument("animal size exceeds enumeration budget");
  if (side == 0) throw std::invalid_argument("grid side must be positive");
  AnimalCounter counter{side, size, adjacency, 0, {}};
  for (std::size_t root = 0; root < side * side; ++root) {
    std::vector<std::size_t> extension;
    for (std::size_t u : counter.neighbors(root))
      if (u > root) extension.push_back(u);
    counter.subgraph = {root};
    counter.extend(std::move(extension), root);
  }
  return counter.count;
}

}  // namespace nngraph
