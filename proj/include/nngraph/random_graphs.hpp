#pragma once

#include <cstddef>
#include <cstdint>

#include "nngraph/seed.hpp"
#include "nngraph/sparse_graph.hpp"

namespace nngraph {

/// Erdos-Renyi G(n, p); geometric skipping keeps the cost O(n + edges).
SparseGraph sample_er(std::size_t n, double p, const SeedSpec& seed);

/// Each vertex picks k distinct other vertices uniformly; undirected union.
SparseGraph sample_ulam(std::size_t n, std::size_t k, const SeedSpec& seed);

bool is_connected(const SparseGraph& graph);

enum class GridAdjacency {
  lattice,  // 2d axis neighbors
  king,     // 3^d - 1 neighbors (Chebyshev distance 1)
};

struct GridSpec {
  std::size_t side = 2;
  unsigned d = 2;
  GridAdjacency adjacency = GridAdjacency::lattice;
};

struct PercolationOutcome {
  std::size_t occupied_count = 0;
  std::size_t giant_size = 0;
  double giant_fraction_of_occupied = 0.0;
  double removal_prob = 0.0;
};

/// Removes each site of {0..side-1}^d independently with probability q and
/// measures the largest surviving component. Site s survives iff its
/// counter-based uniform u(seed, s) >= q, so runs sharing a seed are coupled
/// and the surviving set shrinks as q grows.
PercolationOutcome percolate_grid(const GridSpec& spec, double q, const SeedSpec& seed);

/// Largest animal size count_lattice_animals will enumerate.
inline constexpr std::size_t kMaxAnimalSize = 6;

/// Number of connected site subsets of the given size in the side x side grid.
/// Exhaustive enumeration; only d = 2 is supported.
std::uint64_t count_lattice_animals(std::size_t side, unsigned d, std::size_t size,
                                    GridAdjacency adjacency = GridAdjacency::king);

}  // namespace nngraph
