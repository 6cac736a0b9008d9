#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nngraph/seed.hpp"

namespace nngraph {

/// n points in [0,1]^d stored row-major, with optional integer labels.
class PointCloud {
 public:
  explicit PointCloud(std::size_t dim = 1) : PointCloud(dim, {}) {}
  PointCloud(std::size_t dim, std::vector<double> coords, std::vector<int> labels = {});

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double coord(std::size_t i, std::size_t axis) const { return coords_[i * dim_ + axis]; }
  const std::vector<double>& coords() const { return coords_; }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }

  /// Cloud made of the listed points, in the listed order.
  PointCloud subset(std::span<const std::size_t> ids) const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<int> labels_;
};

/// n i.i.d. uniform points in [0,1]^d.
PointCloud sample_uniform(std::size_t n, std::size_t d, const SeedSpec& seed);

/// Poisson point process of the given intensity on [0,1]^d:
/// N ~ Poisson(intensity), then N uniform points.
PointCloud sample_poisson_process(double intensity, std::size_t d, const SeedSpec& seed);

/// Four Gaussian blobs at the corners of a centered square plus an
/// Archimedean spiral band, labeled 0..3 (blobs) and 4 (spiral).
/// Each blob gets max(1, n_total/8) points, the spiral the remainder.
PointCloud make_spiral_clusters(std::size_t n_total, const SeedSpec& seed);

struct SpiralParameters {
  static constexpr double blob_std = 0.02;
  static constexpr double blob_offset = 0.35;  // corner distance from center, per axis
  static constexpr double spiral_inner_radius = 0.05;
  static constexpr double spiral_outer_radius = 0.30;
  static constexpr double spiral_turns = 2.5;
  static constexpr double spiral_noise_std = 0.015;
};

// Point file formats.
//
// CSV: one point per line, d columns, optional trailing integer label, no header.
// Binary: "PTS1", u32 LE dim, u64 LE n, then n*d binary64 LE coordinates.

void write_points_csv(const PointCloud& cloud, std::ostream& out);
/// expected_dim = 0 infers the dimension from the first row (an empty file is then an error).
PointCloud read_points_csv(std::istream& in, bool has_label_column, std::size_t expected_dim = 0);

void write_points_binary(const PointCloud& cloud, std::ostream& out);
PointCloud read_points_binary(std::istream& in);

/// Reads either format, detecting the binary magic. Throws std::runtime_error
/// if the file cannot be opened.
PointCloud load_points(const std::string& path, bool has_label_column = false,
                       std::size_t expected_dim = 0);

}  // namespace nngraph
