#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "smallnoise/rng.hpp"
#include "smallnoise/types.hpp"

namespace smallnoise::testing {

// Builds an observation sample directly from an increment matrix (y == x,
// zero noise spec); handy for estimator oracles on synthetic data.
inline NoisySample sample_from_increments(const Eigen::ArrayXXd& incr) {
  const int n = static_cast<int>(incr.rows());
  const int d = static_cast<int>(incr.cols());
  LatentPath latent{Grid(n), d};
  for (int m = 0; m < d; ++m) {
    latent.x(0, m) = 0.0;
    for (int i = 0; i < n; ++i) latent.x(i + 1, m) = latent.x(i, m) + incr(i, m);
  }
  NoisySample s{latent, latent.x,
                d == 1 ? NoiseSpec(0.0) : NoiseSpec::bivariate(0.0, 0.0), 0};
  return s;
}

inline Eigen::ArrayXXd brownian_increments(int n, int d, double sigma2,
                                           std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  NormalSampler normal;
  Eigen::ArrayXXd incr(n, d);
  const double sd = std::sqrt(sigma2 / n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < d; ++m) incr(i, m) = sd * normal(rng);
  return incr;
}

}  // namespace smallnoise::testing
