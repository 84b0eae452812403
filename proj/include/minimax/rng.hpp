#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>

namespace minimax {

/// Counter-style pseudo-random stream based on the splitmix64 recurrence.
/// The generator is pinned so that index streams (and therefore paired
/// stability runs) replay bit-identically across platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform index in [0, n). Modulo bias is below 2^-44 for n <= 10^6.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  /// Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  /// Standard normal via Box-Muller (cosine branch only).
  double next_gaussian() {
    double u1 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Student-t with nu degrees of freedom, Bailey's polar method.
  double next_student_t(double nu) {
    for (;;) {
      const double u = next_uniform(-1.0, 1.0);
      const double v = next_uniform(-1.0, 1.0);
      const double r2 = u * u + v * v;
      if (r2 > 0.0 && r2 < 1.0)
        return u * std::sqrt(nu * (std::pow(r2, -2.0 / nu) - 1.0) / r2);
    }
  }

 private:
  std::uint64_t state_;
};

/// Stable per-repeat seed derivation: mixes (base, k) through the splitmix64
/// output function so repeat streams are decorrelated but reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  std::uint64_t z = base + (k + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Concurrency cap from MINIMAX_STAB_THREADS (0 or unset = auto).
inline unsigned thread_cap() {
  const char* env = std::getenv("MINIMAX_STAB_THREADS");
  if (env == nullptr) return 0;
  const long v = std::strtol(env, nullptr, 10);
  return v > 0 ? static_cast<unsigned>(v) : 0;
}

}  // namespace minimax
