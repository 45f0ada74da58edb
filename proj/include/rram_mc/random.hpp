#pragma once

#include <cstdint>
#include <random>

namespace rram_mc {

using Rng = std::mt19937_64;

// Independent random streams derived from one run seed. Keeping them apart
// means e.g. enabling device noise does not perturb the initial cart states.
enum class Stream : std::uint32_t {
  Environment = 1,
  Policy = 2,
  DeviceInit = 3,
  DeviceNoise = 4,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// A zero standard deviation returns the mean without consuming the stream.
inline double gaussian(Rng& rng, double mean, double stddev) {
  if (stddev == 0.0) return mean;
  return std::normal_distribution<double>(mean, stddev)(rng);
}

}  // namespace rram_mc
