#include "dnns/rng.h"

#include <cmath>
#include <limits>

namespace dnns {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Rng Rng::stream(std::uint64_t base, std::string_view name, std::uint64_t index) {
  std::uint64_t k = splitmix64(base ^ fnv1a(name));
  return Rng(splitmix64(k + splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling keeps the result unbiased and platform independent.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::exponential(double mean) {
  // Inverse CDF on (0, 1].
  return -mean * std::log(1.0 - uniform());
}

double Rng::normal() {
  // Box-Muller, one variate per call.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace dnns
