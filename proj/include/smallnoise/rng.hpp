#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace smallnoise {

// SplitMix64 finalizer; also used to expand one 64-bit seed into engine state.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent sub-seed from a master seed and a list of stream
// identifiers (experiment, case, replication, purpose). Pure mixing, so the
// same tuple always yields the same stream no matter which thread asks.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = master;
  std::uint64_t acc = splitmix64(s);
  for (std::uint64_t id : ids) {
    s = acc ^ (id * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
    acc = splitmix64(s);
  }
  return acc;
}

// xoshiro256++ (Blackman & Vigna). Small, fast, and bit-reproducible across
// platforms, which std::normal_distribution is not.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on [0,1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // uniform on (0,1], safe under log()
  double uniform_pos() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Standard normal draws via the Marsaglia polar method with one cached spare.
class NormalSampler {
 public:
  double operator()(Xoshiro256pp& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng.uniform() - 1.0;
      v = 2.0 * rng.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline double exponential(Xoshiro256pp& rng) { return -std::log(rng.uniform_pos()); }

// Poisson by inversion (product of uniforms); fine for the small per-cell
// means used here (lambda * delta << 1).
inline int poisson_small(Xoshiro256pp& rng, double mean) {
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform_pos();
  } while (p > limit);
  return k - 1;
}

// Symmetric alpha-stable draw, Chambers-Mallows-Stuck. Unit scale; the
// caller applies the per-step scale delta^{1/alpha}.
inline double stable_symmetric(Xoshiro256pp& rng, double alpha) {
  const double u = std::numbers::pi * (rng.uniform() - 0.5);  // U(-pi/2, pi/2)
  const double e = exponential(rng);
  const double cu = std::cos(u);
  return std::sin(alpha * u) / std::pow(cu, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
}

}  // namespace smallnoise
