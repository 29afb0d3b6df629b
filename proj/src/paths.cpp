#include "smallnoise/paths.hpp"

#include <algorithm>
#include <cmath>

namespace smallnoise {

namespace {

constexpr double kVarianceFloor = 1e-10;

// Purpose tags for sub-stream derivation.
enum : std::uint64_t { kDiffusion1 = 1, kDiffusion2 = 2, kJumps = 3, kNoise = 4 };

struct CellJump {
  int cell;
  double size;
};

// Brownian increments ~ N(0, delta), one per cell.
Eigen::ArrayXd brownian_increments(Xoshiro256pp& rng, NormalSampler& normal,
                                   const Grid& grid) {
  const double sd = std::sqrt(grid.delta());
  Eigen::ArrayXd dw(grid.n);
  for (int i = 0; i < grid.n; ++i) dw(i) = sd * normal(rng);
  return dw;
}

}  // namespace

Eigen::ArrayXd simulate_variance_path(const SvParams& params, const Grid& grid,
                                      const Eigen::ArrayXd& driver,
                                      const Eigen::ArrayXd& partner) {
  params.validate();
  if (driver.size() != grid.n || partner.size() != grid.n)
    throw std::invalid_argument("simulate_variance_path: driver length != n");

  const double delta = grid.delta();
  const double rho = params.rho;
  const double rho_perp = std::sqrt(1.0 - rho * rho);

  Eigen::ArrayXd v(grid.n + 1);
  v(0) = params.v0;
  for (int i = 0; i < grid.n; ++i) {
    const double dws = rho * driver(i) + rho_perp * partner(i);
    const double prop = v(i) + params.alpha * (params.beta - v(i)) * delta + v(i) * dws;
    v(i + 1) = std::max(prop, kVarianceFloor);
  }
  return v;
}

LatentPath simulate_univariate(const SvParams& sv, const JumpSpec& jumps,
                               const Grid& grid, std::uint64_t seed) {
  sv.validate();
  jumps.validate();
  if (jumps.kind == JumpKind::cojump_component)
    throw std::invalid_argument("simulate_univariate: cojump spec needs the bivariate simulator");

  Xoshiro256pp diff_rng(derive_seed(seed, {kDiffusion1}));
  Xoshiro256pp jump_rng(derive_seed(seed, {kJumps}));
  NormalSampler normal;

  const int n = grid.n;
  const double delta = grid.delta();

  const Eigen::ArrayXd dw = brownian_increments(diff_rng, normal, grid);
  const Eigen::ArrayXd dw_perp = brownian_increments(diff_rng, normal, grid);
  const Eigen::ArrayXd v = simulate_variance_path(sv, grid, dw, dw_perp);

  // Jump increment per cell plus truth bookkeeping.
  Eigen::ArrayXd dj = Eigen::ArrayXd::Zero(n);
  LatentPath path(grid, 1);
  if (jumps.kind == JumpKind::compound_poisson) {
    const double cell_mean = jumps.intensity * delta;
    for (int i = 0; i < n; ++i) {
      const int k = poisson_small(jump_rng, cell_mean);
      for (int j = 0; j < k; ++j) {
        double size = jump_rng.uniform(jumps.size_lo, jumps.size_hi);
        if (jump_rng.next() & 1ULL) size = -size;
        dj(i) += size;
        path.truth.jumps.push_back({i + 1, size, 0.0, v(i), 0.0});
        path.truth.jump_qv(0, 0) += size * size;
        path.truth.d11 += v(i) * size * size;
      }
    }
  } else if (jumps.kind == JumpKind::stable) {
    // Per-cell increments of a beta-stable Levy process; recorded at cell
    // level since the individual jumps are not resolvable on the grid.
    const double step_scale = jumps.scale * std::pow(delta, 1.0 / jumps.beta_index);
    for (int i = 0; i < n; ++i) {
      const double inc = step_scale * stable_symmetric(jump_rng, jumps.beta_index);
      dj(i) = inc;
      path.truth.jumps.push_back({i + 1, inc, 0.0, v(i), 0.0});
      path.truth.jump_qv(0, 0) += inc * inc;
      path.truth.d11 += v(i) * inc * inc;
    }
  }

  path.x(0, 0) = 0.0;
  for (int i = 0; i < n; ++i)
    path.x(i + 1, 0) = path.x(i, 0) + std::sqrt(v(i)) * dw(i) + dj(i);

  for (int i = 0; i < n; ++i) {
    path.truth.iv(0, 0) += v(i) * delta;
    path.truth.iq(0, 0) += v(i) * v(i) * delta;
  }
  return path;
}

LatentPath simulate_bivariate_cojump(const SvParams& sv1, const SvParams& sv2,
                                     const JumpSpec& jumps, const Grid& grid,
                                     std::uint64_t seed, BivariateMode mode) {
  sv1.validate();
  sv2.validate();
  jumps.validate();

  Xoshiro256pp diff1_rng(derive_seed(seed, {kDiffusion1}));
  Xoshiro256pp diff2_rng(derive_seed(seed, {kDiffusion2}));
  Xoshiro256pp jump_rng(derive_seed(seed, {kJumps}));
  NormalSampler normal1, normal2, jnormal;

  const int n = grid.n;
  const double delta = grid.delta();

  const Eigen::ArrayXd dw1 = brownian_increments(diff1_rng, normal1, grid);
  const Eigen::ArrayXd dw1p = brownian_increments(diff1_rng, normal1, grid);
  const Eigen::ArrayXd dw2 = brownian_increments(diff2_rng, normal2, grid);
  const Eigen::ArrayXd dw2p = brownian_increments(diff2_rng, normal2, grid);
  const Eigen::ArrayXd v1 = simulate_variance_path(sv1, grid, dw1, dw1p);
  const Eigen::ArrayXd v2 = simulate_variance_path(sv2, grid, dw2, dw2p);

  const double l3 = (mode == BivariateMode::disjoint) ? 0.0 : jumps.lambda3;

  std::vector<CellJump> idio1, idio2;
  struct CommonJump {
    int cell;
    double z1, z2;
  };
  std::vector<CommonJump> common;

  for (int i = 0; i < n; ++i) {
    const int cell = i + 1;
    int k = jumps.lambda1 > 0.0 ? poisson_small(jump_rng, jumps.lambda1 * delta) : 0;
    for (int j = 0; j < k; ++j) idio1.push_back({cell, jumps.sd1 * jnormal(jump_rng)});
    k = jumps.lambda2 > 0.0 ? poisson_small(jump_rng, jumps.lambda2 * delta) : 0;
    for (int j = 0; j < k; ++j) idio2.push_back({cell, jumps.sd2 * jnormal(jump_rng)});
    k = l3 > 0.0 ? poisson_small(jump_rng, l3 * delta) : 0;
    for (int j = 0; j < k; ++j)
      common.push_back({cell, jumps.sd3 * jnormal(jump_rng), jumps.sd4 * jnormal(jump_rng)});
  }

  if (mode == BivariateMode::disjoint) {
    // No grid cell may carry jumps of both components; shift colliding
    // second-component jumps to the nearest cell free of first-component
    // jumps. Collisions are rare (expected lambda1*lambda2*delta per path).
    std::vector<char> occupied1(n + 1, 0);
    for (const auto& j : idio1) occupied1[j.cell] = 1;
    for (auto& j : idio2) {
      if (!occupied1[j.cell]) continue;
      for (int off = 1; off <= n; ++off) {
        const int right = j.cell + off, left = j.cell - off;
        if (right <= n && !occupied1[right]) {
          j.cell = right;
          break;
        }
        if (left >= 1 && !occupied1[left]) {
          j.cell = left;
          break;
        }
      }
    }
  }

  Eigen::ArrayXd dj1 = Eigen::ArrayXd::Zero(n), dj2 = Eigen::ArrayXd::Zero(n);
  LatentPath path(grid, 2);
  PathTruth& t = path.truth;

  for (const auto& j : idio1) {
    dj1(j.cell - 1) += j.size;
    t.jumps.push_back({j.cell, j.size, 0.0, v1(j.cell - 1), v2(j.cell - 1)});
    t.jump_qv(0, 0) += j.size * j.size;
    t.d11 += v1(j.cell - 1) * j.size * j.size;
  }
  for (const auto& j : idio2) {
    dj2(j.cell - 1) += j.size;
    t.jumps.push_back({j.cell, 0.0, j.size, v1(j.cell - 1), v2(j.cell - 1)});
    t.jump_qv(1, 1) += j.size * j.size;
  }
  for (const auto& j : common) {
    dj1(j.cell - 1) += j.z1;
    dj2(j.cell - 1) += j.z2;
    const double c11 = v1(j.cell - 1), c22 = v2(j.cell - 1);
    t.jumps.push_back({j.cell, j.z1, j.z2, c11, c22});
    t.jump_qv(0, 0) += j.z1 * j.z1;
    t.jump_qv(1, 1) += j.z2 * j.z2;
    t.jump_qv(0, 1) += j.z1 * j.z2;
    t.jump_qv(1, 0) += j.z1 * j.z2;
    t.d11 += c11 * j.z1 * j.z1;
    const double z1sq = j.z1 * j.z1, z2sq = j.z2 * j.z2;
    t.s0 += z1sq * z2sq;
    t.j42 += z1sq * z1sq * z2sq;
    t.j24 += z1sq * z2sq * z2sq;
    // c^{(1,2)} = 0: the two Brownian drivers are independent.
    t.f22 += 4.0 * c11 * z1sq * z2sq * z2sq + 4.0 * c22 * z1sq * z1sq * z2sq;
  }

  path.x.row(0).setZero();
  for (int i = 0; i < n; ++i) {
    path.x(i + 1, 0) = path.x(i, 0) + std::sqrt(v1(i)) * dw1(i) + dj1(i);
    path.x(i + 1, 1) = path.x(i, 1) + std::sqrt(v2(i)) * dw2(i) + dj2(i);
  }
  for (int i = 0; i < n; ++i) {
    t.iv(0, 0) += v1(i) * delta;
    t.iv(1, 1) += v2(i) * delta;
    t.iq(0, 0) += v1(i) * v1(i) * delta;
    t.iq(1, 1) += v2(i) * v2(i) * delta;
  }
  return path;
}

NoisySample add_noise(const LatentPath& path, const NoiseSpec& noise,
                      std::uint64_t seed) {
  noise.validate();
  if (noise.zeta.size() != path.d)
    throw std::invalid_argument("add_noise: one zeta per component required");

  Xoshiro256pp rng(derive_seed(seed, {kNoise}));
  NormalSampler normal;

  NoisySample sample{path, path.x, noise, seed};
  const int n = path.grid.n;
  Eigen::VectorXd eps(path.d);
  for (int m = 0; m < path.d; ++m) eps(m) = noise.eps(n, m);

  for (int i = 0; i <= n; ++i)
    for (int m = 0; m < path.d; ++m) sample.y(i, m) += eps(m) * normal(rng);
  return sample;
}

}  // namespace smallnoise
