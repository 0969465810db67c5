#pragma once

#include <cstdint>
#include <random>

namespace pcl {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based seed splitting: the seed for (stream, index) depends only on
// the master seed and the counters, never on scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

inline Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

// Named streams so that unrelated consumers of one master seed never collide.
namespace stream {
inline constexpr std::uint64_t kReplication = 0x7265706cULL;
inline constexpr std::uint64_t kCalibration = 0x63616c69ULL;
inline constexpr std::uint64_t kSpectralGap = 0x73676170ULL;
inline constexpr std::uint64_t kOracle = 0x6f72636cULL;
}  // namespace stream

}  // namespace pcl
