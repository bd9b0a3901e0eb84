#pragma once

#include <cmath>
#include <cstdint>

namespace cleanbound {

// Splittable PRNG built on the splitmix64 sequence. Every random quantity in
// the library is drawn from an explicitly seeded SplitRng so that outputs are
// bit-reproducible for a given seed. Substreams derived via split(key) are
// independent of how much the parent stream has been consumed, which keeps
// per-row generation order-independent.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double next_double_open() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double next_gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  // Child stream keyed on (construction seed, key), independent of the
  // parent's position.
  SplitRng split(std::uint64_t key) const { return SplitRng(derive_seed(seed_, key)); }

  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
    return mix64(seed ^ mix64(key + 0x632BE59BD9B4E019ULL));
  }

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Gamma(alpha, 1) via Marsaglia-Tsang, with the power boost for alpha < 1.
inline double sample_gamma(SplitRng& rng, double alpha) {
  if (alpha < 1.0) {
    const double u = rng.next_double_open();
    return sample_gamma(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double sample_beta(SplitRng& rng, double alpha, double beta) {
  const double x = sample_gamma(rng, alpha);
  const double y = sample_gamma(rng, beta);
  return x / (x + y);
}

}  // namespace cleanbound
