#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

// Counter-based pseudorandom streams keyed by (seed, level, index, channel).
//
// Every random draw in the library is a pure function of its key, so
// realizations are refinement-stable (extending a tree never perturbs already
// sampled nodes) and parallel-safe (no sequential generator state).
//
// Key schedule, fixed per major version:
//   run_state(seed)              = splitmix64(seed ^ 0x636173636164656c)
//   level_state(run, level)      = splitmix64(run ^ level)
//   node_state(levelstate, idx)  = splitmix64(levelstate ^ idx)
//   channel_bits(node, c)        = splitmix64(node + (c + 1) * 0x9e3779b97f4a7c15)
//   uniform53(bits)              = (bits >> 11) * 2^-53           in [0, 1)
// Replica streams for ensembles:
//   replica_seed(seed, tag, r)   = splitmix64(splitmix64(seed ^ tag) + r)

namespace cascadelab::rng {

inline constexpr std::uint64_t kRunTag = 0x636173636164656cULL;
inline constexpr std::uint64_t kChannelStep = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t run_state(std::uint64_t seed) {
  return splitmix64(seed ^ kRunTag);
}

inline constexpr std::uint64_t level_state(std::uint64_t run, std::uint64_t level) {
  return splitmix64(run ^ level);
}

inline constexpr std::uint64_t node_state_from_level(std::uint64_t levelstate,
                                                     std::uint64_t index) {
  return splitmix64(levelstate ^ index);
}

inline constexpr std::uint64_t node_state(std::uint64_t seed, std::uint64_t level,
                                          std::uint64_t index) {
  return node_state_from_level(level_state(run_state(seed), level), index);
}

inline constexpr std::uint64_t channel_bits(std::uint64_t node, std::uint64_t channel) {
  return splitmix64(node + (channel + 1) * kChannelStep);
}

inline constexpr double uniform53(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double channel_uniform(std::uint64_t node, std::uint64_t channel) {
  return uniform53(channel_bits(node, channel));
}

/// Stream derivation for ensemble replicas; `tag` separates e.g. the Z_n
/// stream from the reference stream of the same base seed.
inline constexpr std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t tag,
                                            std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ tag) + index);
}

inline constexpr std::uint64_t kTagNormalized = 0x5a6e5a6e5a6e5a6eULL;  // Z_n
inline constexpr std::uint64_t kTagReference = 0x5265665265665265ULL;
inline constexpr std::uint64_t kTagResidual = 0x526e526e526e526eULL;
inline constexpr std::uint64_t kTagGaussian = 0x4761757347617573ULL;
inline constexpr std::uint64_t kTagGeneric = 0x456e73656d626c65ULL;

/// Box-Muller pair from channels (c, c+1); first uniform mapped into (0, 1].
inline std::pair<double, double> gaussian_pair(std::uint64_t node, std::uint64_t channel) {
  const double u1 =
      static_cast<double>((channel_bits(node, channel) >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform53(channel_bits(node, channel + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

inline double gaussian(std::uint64_t node, std::uint64_t channel = 0) {
  return gaussian_pair(node, channel).first;
}

}  // namespace cascadelab::rng
