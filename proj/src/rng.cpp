#include "b3c/rng.hpp"

#include <cmath>
#include <numbers>

namespace b3c {

double Rng::gaussian(double mean, double stddev) {
  // u1 in (0,1] so the log is finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) return 0;
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t index) {
  auto smix = [](uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  uint64_t x = smix(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
  return smix(x + 0x9E3779B97F4A7C15ULL * (index + 1));
}

}  // namespace b3c
