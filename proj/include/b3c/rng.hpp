#pragma once

#include <cstdint>

namespace b3c {

// Deterministic splitmix64 stream. All randomness in the project flows
// through this type so that runs are bitwise reproducible: the standard
// library distributions are implementation-defined and therefore avoided.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller without caching the second variate; two draws per call keeps
  // the consumed stream length independent of call interleaving.
  double gaussian(double mean, double stddev);

  // Uniform integer in [0, n); rejection sampling, unbiased.
  uint64_t below(uint64_t n);

 private:
  uint64_t state_;
};

// Per-consumer seed derivation: one master seed per run, split into
// independent streams (env episodes, init, batch sampling, noise, ...).
uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t index = 0);

// Stream tags used across the project.
namespace streams {
inline constexpr uint64_t kInit = 1;
inline constexpr uint64_t kEnvEpisode = 2;
inline constexpr uint64_t kBatch = 3;
inline constexpr uint64_t kExplore = 4;
inline constexpr uint64_t kEval = 5;
inline constexpr uint64_t kTargetNoise = 6;
inline constexpr uint64_t kDataNoise = 7;
}  // namespace streams

}  // namespace b3c
