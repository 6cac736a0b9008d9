#pragma once

#include <cstdint>
#include <random>

namespace nngraph {

/// SplitMix64 finalizer; a bijective avalanche mix of 64 bits.
std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive combination of two words.
std::uint64_t mix(std::uint64_t a, std::uint64_t b);

/// Identifies one reproducible random stream.
///
/// The generator state derived from a SeedSpec is a pure function of
/// (master_seed, stream_id), so trial t of an experiment sees the same
/// randomness regardless of which worker runs it or in which order.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// 64-bit key for this stream.
  std::uint64_t derived() const;

  /// A sub-stream nested under this one (e.g. per-vertex or per-purpose).
  SeedSpec child(std::uint64_t sub_stream) const { return {derived(), sub_stream}; }

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

using Engine = std::mt19937_64;

Engine make_engine(const SeedSpec& seed);

/// Maps 64 random bits to a double in [0, 1) with 53 bits of resolution.
inline double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform01(Engine& engine) { return bits_to_unit(engine()); }

/// Lightweight generator for per-vertex streams where constructing a
/// Mersenne Twister per vertex would dominate the cost.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Uniform integer in [0, bound) without modulo bias (Lemire's method).
template <class Generator>
std::uint64_t uniform_below(Generator& gen, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = gen();
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
  }
}

/// Counter-based uniform in [0, 1): a fixed value for each (key, a, b).
/// Used where draws must be coupled across parameter sweeps.
inline double hashed_uniform(std::uint64_t key, std::uint64_t a, std::uint64_t b = 0) {
  return bits_to_unit(mix(mix(key, a), b));
}

}  // namespace nngraph
