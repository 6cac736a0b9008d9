#include "nngraph/point_cloud.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include "nngraph/format.hpp"

namespace nngraph {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords, std::vector<int> labels)
    : dim_(dim), coords_(std::move(coords)), labels_(std::move(labels)) {
  if (dim_ == 0) throw std::invalid_argument("point cloud dimension must be positive");
  if (coords_.size() % dim_ != 0)
    throw std::invalid_argument("coordinate count is not a multiple of the dimension");
  for (double c : coords_) {
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("coordinate outside [0,1]");
  }
  if (!labels_.empty() && labels_.size() != size())
    throw std::invalid_argument("label count does not match point count");
}

PointCloud PointCloud::subset(std::span<const std::size_t> ids) const {
  std::vector<double> coords;
  coords.reserve(ids.size() * dim_);
  std::vector<int> labels;
  for (std::size_t id : ids) {
    if (id >= size()) throw std::out_of_range("subset id out of range");
    auto p = point(id);
    coords.insert(coords.end(), p.begin(), p.end());
    if (has_labels()) labels.push_back(labels_[id]);
  }
  return PointCloud(dim_, std::move(coords), std::move(labels));
}

PointCloud sample_uniform(std::size_t n, std::size_t d, const SeedSpec& seed) {
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  Engine engine = make_engine(seed);
  std::vector<double> coords(n * d);
  for (double& c : coords) c = uniform01(engine);
  return PointCloud(d, std::move(coords));
}

PointCloud sample_poisson_process(double intensity, std::size_t d, const SeedSpec& seed) {
  if (!(intensity > 0.0) || !std::isfinite(intensity))
    throw std::invalid_argument("Poisson intensity must be positive");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  Engine engine = make_engine(seed.child(0));
  std::poisson_distribution<std::uint64_t> count_dist(intensity);
  const std::uint64_t n = count_dist(engine);
  return sample_uniform(n, d, seed.child(1));
}

PointCloud make_spiral_clusters(std::size_t n_total, const SeedSpec& seed) {
  using P = SpiralParameters;
  if (n_total < 5) throw std::invalid_argument("spiral dataset needs at least 5 points");
  const std::size_t per_blob = std::max<std::size_t>(1, n_total / 8);
  const std::size_t spiral_count = n_total - 4 * per_blob;

  Engine engine = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> coords;
  coords.reserve(2 * n_total);
  std::vector<int> labels;
  labels.reserve(n_total);
  auto push = [&](double x, double y, int label) {
    coords.push_back(std::clamp(x, 0.0, 1.0));
    coords.push_back(std::clamp(y, 0.0, 1.0));
    labels.push_back(label);
  };

  const std::array<std::array<double, 2>, 4> corners{{{-1, -1}, {1, -1}, {-1, 1}, {1, 1}}};
  for (int blob = 0; blob < 4; ++blob) {
    const double cx = 0.5 + corners[blob][0] * P::blob_offset;
    const double cy = 0.5 + corners[blob][1] * P::blob_offset;
    for (std::size_t i = 0; i < per_blob; ++i)
      push(cx + P::blob_std * gauss(engine), cy + P::blob_std * gauss(engine), blob);
  }

  // r = a * theta; theta drawn with density proportional to theta so points
  // are uniform in arc length.
  const double sweep = 2.0 * std::numbers::pi * P::spiral_turns;
  const double a = (P::spiral_outer_radius - P::spiral_inner_radius) / sweep;
  const double theta0 = P::spiral_inner_radius / a;
  const double theta1 = theta0 + sweep;
  for (std::size_t i = 0; i < spiral_count; ++i) {
    const double u = uniform01(engine);
    const double theta = std::sqrt(theta0 * theta0 + u * (theta1 * theta1 - theta0 * theta0));
    const double r = a * theta + P::spiral_noise_std * gauss(engine);
    push(0.5 + r * std::cos(theta), 0.5 + r * std::sin(theta), 4);
  }
  return PointCloud(2, std::move(coords), std::move(labels));
}

void write_points_csv(const PointCloud& cloud, std::ostream& out) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (a) out << ',';
      out << format_double(p[a]);
    }
    if (cloud.has_labels()) out << ',' << cloud.labels()[i];
    out << '\n';
  }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    fields.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <class T>
T parse_number(std::string_view text, std::size_t line_no) {
  T value{};
  const auto* end = text.data() + text.size();
  auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end)
    throw std::runtime_error("malformed number on line " + std::to_string(line_no) + ": '" +
                             std::string(text) + "'");
  return value;
}

void put_le(std::ostream& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& in, int bytes) {
  std::uint64_t value = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("truncated binary point file");
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return value;
}

}  // namespace

PointCloud read_points_csv(std::istream& in, bool has_label_column, std::size_t expected_dim) {
  std::vector<double> coords;
  std::vector<int> labels;
  std::size_t dim = expected_dim;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    auto fields = split_fields(view);
    const std::size_t coord_fields = fields.size() - (has_label_column ? 1 : 0);
    if (coord_fields == 0) throw std::runtime_error("line " + std::to_string(line_no) + " has no coordinates");
    if (dim == 0) dim = coord_fields;
    if (coord_fields != dim)
      throw std::runtime_error("inconsistent column count on line " + std::to_string(line_no));
    for (std::size_t a = 0; a < dim; ++a) coords.push_back(parse_number<double>(fields[a], line_no));
    if (has_label_column) labels.push_back(parse_number<int>(fields.back(), line_no));
  }
  if (dim == 0) throw std::runtime_error("point CSV contains no rows and no dimension was given");
  return PointCloud(dim, std::move(coords), std::move(labels));
}

void write_points_binary(const PointCloud& cloud, std::ostream& out) {
  out.write("PTS1", 4);
  put_le(out, cloud.dim(), 4);
  put_le(out, cloud.size(), 8);
  for (double c : cloud.coords()) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof c);
    std::memcpy(&bits, &c, sizeof bits);
    put_le(out, bits, 8);
  }
}

PointCloud read_points_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || std::string_view(magic.data(), 4) != "PTS1")
    throw std::runtime_error("missing PTS1 magic");
  const auto dim = get_le(in, 4);
  const auto n = get_le(in, 8);
  if (dim == 0) throw std::runtime_error("binary point file declares dimension 0");
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n * dim, 1u << 26)));
  for (std::uint64_t i = 0; i < n * dim; ++i) {
    const std::uint64_t bits = get_le(in, 8);
    double c;
    std::memcpy(&c, &bits, sizeof c);
    coords.push_back(c);
  }
  return PointCloud(static_cast<std::size_t>(dim), std::move(coords));
}

PointCloud load_points(const std::string& path, bool has_label_column, std::size_t expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open point file: " + path);
  std::array<char, 4> head{};
  in.read(head.data(), 4);
  const bool binary = in.gcount() == 4 && std::string_view(head.data(), 4) == "PTS1";
  in.clear();
  in.seekg(0);
  return binary ? read_points_binary(in) : read_points_csv(in, has_label_column, expected_dim);
}

}  // namespace nngraph
