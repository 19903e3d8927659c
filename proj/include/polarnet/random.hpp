#pragma once

#include <cstdint>
#include <random>

namespace polarnet {

/// Independent engine for one (seed, stream, index) triple. Replicate i of a
/// Monte Carlo run always draws from the same sequence, whichever thread
/// executes it.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace polarnet
