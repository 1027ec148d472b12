#pragma once

#include <cmath>
#include <cstdint>

namespace vorsim {

// SplitMix64 engine (Vigna 2015). One 64-bit word of state, passes BigCrush,
// and its output function doubles as the mixer we use to derive independent
// streams from (master seed, trial index, purpose).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_bits(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream purposes keep the random draws used for different jobs of the same
// trial statistically disjoint.
enum class StreamPurpose : std::uint64_t {
  cloud = 1,
  poisson_cloud = 2,
  mc_volume = 3,
  dk_draw = 4,
  measure = 5,
  shuffle = 6,
  generic = 7,
};

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index,
                                        std::uint64_t purpose) {
  std::uint64_t h = mix_bits(master + 0x9e3779b97f4a7c15ULL);
  h = mix_bits(h ^ (index + 0xbf58476d1ce4e5b9ULL));
  h = mix_bits(h ^ (purpose + 0x94d049bb133111ebULL));
  return h;
}

// A deterministic random stream addressed by (master seed, index, purpose).
// Trials indexed this way can run on any number of threads and still produce
// bit-identical results when merged in index order.
class RngStream {
 public:
  RngStream(std::uint64_t master, std::uint64_t index, StreamPurpose purpose)
      : eng_(derive_stream_seed(master, index, static_cast<std::uint64_t>(purpose))) {}

  explicit RngStream(std::uint64_t raw_seed) : eng_(raw_seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double u01_open() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Standard normal via the trigonometric Box-Muller transform; pairs cached
  // so the consumption pattern is two uniforms per two normals.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(u01_open()));
    const double theta = 6.283185307179586476925287 * u01();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Poisson(mean): sequential inversion for small means, Hormann's PTRS
  // transformed rejection for large ones.
  long poisson(double mean);

 private:
  SplitMix64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline long RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean <= 30.0) {
    const double u = u01();
    double p = std::exp(-mean);
    double cdf = p;
    long k = 0;
    while (u > cdf && k < 10000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // PTRS (Hormann 1993).
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = u01() - 0.5;
    double v = u01();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kd;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<long>(kd);
    }
  }
}

}  // namespace vorsim
