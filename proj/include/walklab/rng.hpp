#pragma once

#include <cstdint>
#include <random>

#include "walklab/lattice.hpp"
#include "walklab/params.hpp"

namespace walklab {

/// Identifies one replica's random stream.
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_index = 0;
};

/// stream_seed = mix64(master_seed ^ mix64(replica_index ^ 0x9e3779b97f4a7c15)).
/// mix64 and xor with a constant are bijections, so for a fixed master seed
/// the map replica_index -> stream_seed is injective over all 2^64 indices.
constexpr std::uint64_t seed_derivation(std::uint64_t master_seed, std::uint64_t replica_index) {
  return mix64(master_seed ^ mix64(replica_index ^ 0x9e3779b97f4a7c15ULL));
}

/// Per-replica uniform source. Draws are kEpsilonBits-bit integers taken from
/// the high bits of a 64-bit Mersenne Twister output.
class Stream {
 public:
  explicit Stream(const RngSpec& spec) : engine_(seed_derivation(spec.master_seed, spec.replica_index)) {}

  /// Uniform on [0, 2^40).
  std::uint64_t draw() { return engine_() >> (64 - kEpsilonBits); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace walklab
