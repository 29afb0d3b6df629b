#pragma once

#include <cstdint>

#include "smallnoise/rng.hpp"
#include "smallnoise/types.hpp"

namespace smallnoise {

enum class BivariateMode { cojump, disjoint };

// Euler scheme for dv = alpha(beta - v)dt + v dW^sigma with full truncation
// at 1e-10. `driver` supplies the increments of the Brownian motion that
// also drives the price; `partner` the independent component, so that
// dW^sigma = rho dW + sqrt(1-rho^2) dW_perp. Returns v_{t_0..t_n}.
Eigen::ArrayXd simulate_variance_path(const SvParams& params, const Grid& grid,
                                      const Eigen::ArrayXd& driver,
                                      const Eigen::ArrayXd& partner);

// dX = sigma dW + dJ with the jump law given by `jumps` (none, compound
// Poisson, or symmetric beta-stable). Jumps land at cell right-endpoints.
LatentPath simulate_univariate(const SvParams& sv, const JumpSpec& jumps,
                               const Grid& grid, std::uint64_t seed);

// Bivariate model with idiosyncratic Poisson jumps in each component and a
// common Poisson stream driving simultaneous jumps. mode == disjoint forces
// lambda3 = 0 and resolves any grid-cell collision between the two
// idiosyncratic streams by shifting one jump to a neighbouring cell, so no
// cell carries jumps in both components.
LatentPath simulate_bivariate_cojump(const SvParams& sv1, const SvParams& sv2,
                                     const JumpSpec& jumps, const Grid& grid,
                                     std::uint64_t seed, BivariateMode mode);

// y_i = x_i + eps_m v_i for i = 0..n (the i = 0 observation is noisy too).
NoisySample add_noise(const LatentPath& path, const NoiseSpec& noise,
                      std::uint64_t seed);

}  // namespace smallnoise
