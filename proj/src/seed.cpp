#include "nngraph/seed.hpp"

namespace nngraph {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

std::uint64_t SeedSpec::derived() const { return mix(master_seed, stream_id); }

Engine make_engine(const SeedSpec& seed) { return Engine(seed.derived()); }

}  // namespace nngraph
