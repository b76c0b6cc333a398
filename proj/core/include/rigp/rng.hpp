#pragma once

#include <cstdint>
#include <random>

namespace rigp {

/// All stochastic code in the library draws from this engine. Streams for
/// independent chains/replicates are derived with `derive_seed`, so a run is
/// fully determined by its base seed.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; maps (base, stream) to a well-mixed 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t base, std::uint64_t stream = 0) {
  return Rng(derive_seed(base, stream));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace rigp
