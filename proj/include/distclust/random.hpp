#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace distclust {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent 64-bit seed from a parent seed, a label and an index.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                                 std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(parent ^ hash_label(label)) + splitmix64(index + 1));
}

/// Seeded generator. Distributions are implemented here instead of through
/// <random> distribution classes, whose output is implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }

  /// Uniform integer on [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the result exactly uniform.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    const double u1 = uniform_open_zero();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Rng child(std::string_view label, std::uint64_t index = 0) {
    return Rng(derive_seed(engine_(), label, index));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace distclust
