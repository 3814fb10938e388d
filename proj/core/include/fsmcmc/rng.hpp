#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace fsmcmc {

/// Random source with explicit stream derivation.
///
/// Every chain owns one stream. Streams are derived from a 64-bit master
/// seed via the splitmix64 finalizer applied to
/// (master_seed + stream_index * 0x9E3779B97F4A7C15); the engine is
/// mt19937_64 seeded with the derived value. Distributions are generated
/// by fixed algorithms (Box-Muller for normals, Marsaglia-Tsang for
/// Gamma) rather than std:: distribution objects, so the draw sequence
/// depends only on (seed, call order), not on the standard library.
class RngStream {
 public:
  static constexpr const char* kAlgorithm =
      "mt19937_64 + splitmix64 stream derivation; Box-Muller normals; "
      "Marsaglia-Tsang gamma";

  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static RngStream derive(std::uint64_t master_seed, std::uint64_t stream) {
    return RngStream(mix64(master_seed + stream * 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), rejection-corrected for exactness.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal. Box-Muller; the paired draw is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Gamma(shape, rate) via Marsaglia-Tsang; shape < 1 boosted through
  /// Gamma(shape + 1) * U^(1/shape).
  double gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0)
      throw std::invalid_argument("gamma: shape and rate must be > 0");
    if (shape < 1.0) {
      const double boost = std::pow(uniform_open(), 1.0 / shape);
      return gamma(shape + 1.0, rate) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v / rate;
    }
  }

 private:
  double uniform_open() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return u;
  }

  static std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fsmcmc
