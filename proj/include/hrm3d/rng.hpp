#pragma once

#include <cstdint>
#include <random>

namespace hrm3d {

// One RNG per (seed, stream) pair; streams keep frame/model draws independent
// without sharing state across parallel units.
inline std::mt19937_64 seeded_rng(uint64_t seed, uint64_t stream = 0) {
  const uint64_t mix = stream * 0x9E3779B97F4A7C15ULL;
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(mix), static_cast<uint32_t>(mix >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace hrm3d
