#ifndef DGC_RNG_HPP
#define DGC_RNG_HPP

#include <cstdint>
#include <random>

namespace dgc {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (seed, tag). Tags separate consumers (partitioning,
// topology, per-user init) so that adding one never perturbs another.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

namespace seed_tags {
inline constexpr std::uint64_t partition = 0x7061727469ULL;
inline constexpr std::uint64_t topology = 0x746f706fULL;
inline constexpr std::uint64_t init = 0x696e6974ULL;
inline constexpr std::uint64_t user_base = 0x75736572ULL << 20;
}  // namespace seed_tags

/// Per-user stream used by every initialization scheme.
inline std::uint64_t user_seed(std::uint64_t seed, std::uint64_t user) {
  return derive_seed(seed, seed_tags::user_base + user);
}

}  // namespace dgc

#endif  // DGC_RNG_HPP
