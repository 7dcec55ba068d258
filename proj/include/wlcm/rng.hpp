#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "types.hpp"

namespace wlcm {

// SplitMix64 finalizer; used to derive independent child seeds.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Deterministic random stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Variates are produced by the transforms below rather than by
// <random> distributions, whose algorithms differ between standard libraries:
//   uniform      top 53 bits of one engine word, scaled to [0, 1)
//   normal       Box-Muller on (u1 in (0,1], u2 in [0,1)); the sine variate is cached
//   exponential  -mean * log(u), u in (0, 1)
//   poisson      multiplication method below mean 10, PTRS rejection (Hormann 1993) above
// Not thread-safe; give each replicate its own handle.
class RngHandle {
 public:
  explicit RngHandle(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  // Uniform on (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Uniform integer in [0, n).
  int below(int n) {
    require(n > 0, ErrorCode::InvalidArgument, "below() needs a positive bound");
    auto bound = static_cast<std::uint64_t>(n);
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<int>(x % bound);
  }

  double standard_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
  }

  double normal(double mean, double sd) { return mean + sd * standard_normal(); }

  double exponential(double mean) { return -mean * std::log(uniform_open()); }

  bool bernoulli(double p) { return uniform() < p; }

  std::int64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) {
      double limit = std::exp(-mean);
      double prod = uniform();
      std::int64_t k = 0;
      while (prod > limit) {
        ++k;
        prod *= uniform();
      }
      return k;
    }
    return poisson_ptrs(mean);
  }

 private:
  std::int64_t poisson_ptrs(double lam) {
    const double slam = std::sqrt(lam);
    const double loglam = std::log(lam);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform();
      double us = 0.5 - std::fabs(u);
      double k = std::floor((2.0 * a / us + b) * u + lam + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          -lam + k * loglam - std::lgamma(k + 1.0))
        return static_cast<std::int64_t>(k);
    }
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace wlcm
