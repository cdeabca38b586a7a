#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dnns {

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a; used to key named random streams and config hashes.
std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ULL);

// Deterministic generator with portable variate helpers. The standard
// distributions are implementation-defined, so everything that feeds
// reproducible output goes through the helpers below.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Independent child stream. Deriving a new stream never advances this one.
  static Rng stream(std::uint64_t base, std::string_view name, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  double exponential(double mean);

  double normal();

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dnns
