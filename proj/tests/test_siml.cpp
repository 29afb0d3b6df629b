#include <doctest.h>

#include <cmath>

#include "smallnoise/paths.hpp"
#include "smallnoise/siml.hpp"
#include "smallnoise/stats.hpp"
#include "smallnoise/variation.hpp"
#include "test_helpers.hpp"

using namespace smallnoise;
using smallnoise::testing::brownian_increments;
using smallnoise::testing::sample_from_increments;

TEST_CASE("cosine basis eigenvalue formula") {
  // n = 2, k = 1: 2[1 - cos(pi/5)]
  CHECK(siml_eigenvalue(2, 1) == doctest::Approx(0.3819660112501051).epsilon(1e-12));
  CHECK_THROWS_AS(siml_eigenvalue(2, 3), std::invalid_argument);
}

TEST_CASE("spectral decomposition identity at small n") {
  for (int n = 2; n <= 8; ++n) {
    const Eigen::MatrixXd p = siml_projection_matrix(n);
    const Eigen::MatrixXd cinv = cumulation_inverse(n);
    Eigen::VectorXd d(n);
    for (int k = 1; k <= n; ++k) d(k - 1) = siml_eigenvalue(n, k);
    const Eigen::MatrixXd lhs = cinv * cinv.transpose();
    const Eigen::MatrixXd rhs = p * d.asDiagonal() * p.transpose();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("projection matrix is orthonormal") {
  const int n = 64;
  const Eigen::MatrixXd p = siml_projection_matrix(n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  CHECK((p * p.transpose() - eye).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transform of zero increments is zero") {
  const Eigen::MatrixXd z = siml_transform(Eigen::MatrixXd::Zero(16, 2), 4);
  CHECK(z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transform linearity") {
  Xoshiro256pp rng(3);
  NormalSampler normal;
  const int n = 50, m = 7;
  Eigen::MatrixXd u(n, 1), v(n, 1);
  for (int i = 0; i < n; ++i) {
    u(i, 0) = normal(rng);
    v(i, 0) = normal(rng);
  }
  const double a = 2.5, b = -0.75;
  const Eigen::MatrixXd lhs = siml_transform(a * u + b * v, m);
  const Eigen::MatrixXd rhs = a * siml_transform(u, m) + b * siml_transform(v, m);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("qv estimator matches a dense matrix-product oracle at n = 8") {
  const int n = 8;
  const SimlConfig cfg(0.49);
  const int m = cfg.m(n);

  auto oracle = [&](const Eigen::ArrayXXd& incr) {
    const Eigen::MatrixXd p = siml_projection_matrix(n);
    const Eigen::MatrixXd z =
        std::sqrt(static_cast<double>(n)) * (p * incr.matrix());
    Eigen::MatrixXd qv = Eigen::MatrixXd::Zero(incr.cols(), incr.cols());
    for (int k = 0; k < m; ++k) qv += z.row(k).transpose() * z.row(k);
    return Eigen::MatrixXd(qv / m);
  };

  SUBCASE("constant increments") {
    const Eigen::ArrayXXd incr = Eigen::ArrayXXd::Constant(n, 1, 0.3);
    const SimlResult res = siml_qv(sample_from_increments(incr), cfg);
    CHECK(res.m == m);
    CHECK(std::abs(res.qv(0, 0) - oracle(incr)(0, 0)) < 1e-12);
  }
  SUBCASE("random bivariate increments") {
    Xoshiro256pp rng(17);
    NormalSampler normal;
    Eigen::ArrayXXd incr(n, 2);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) incr(i, c) = normal(rng);
    const SimlResult res = siml_qv(sample_from_increments(incr), cfg);
    const Eigen::MatrixXd expect = oracle(incr);
    CHECK((res.qv - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("frequency cutoff values") {
  const SimlConfig cfg(0.49);
  CHECK(cfg.m(20000) == 128);
  CHECK(cfg.m(30000) == 156);
  CHECK_THROWS_AS(SimlConfig(0.6), std::invalid_argument);
}

TEST_CASE("qv and noise variance are consistent under small noise") {
  const double sigma2 = 0.04, zeta = 1e-2;
  const int n = 30000, reps = 200;
  const SimlConfig cfg(0.49);
  const SimlBasis basis(n, cfg.m(n));
  const Grid grid(n);

  std::vector<double> qvs(reps), zetas(reps);
  for (int r = 0; r < reps; ++r) {
    Eigen::ArrayXXd incr = brownian_increments(
        n, 1, sigma2, derive_seed(888, {static_cast<std::uint64_t>(r)}));
    LatentPath latent{grid, 1};
    for (int i = 0; i < n; ++i) latent.x(i + 1, 0) = latent.x(i, 0) + incr(i, 0);
    const NoisySample s = add_noise(latent, NoiseSpec(zeta),
                                    derive_seed(889, {static_cast<std::uint64_t>(r)}));
    const SimlResult res = siml_qv(s, cfg, &basis);
    qvs[r] = res.qv(0, 0);
    zetas[r] = res.zeta_hat(0);
  }
  CHECK(sample_mean(qvs) == doctest::Approx(sigma2).epsilon(0.15));
  CHECK(sample_mean(zetas) == doctest::Approx(zeta).epsilon(0.15));
}

TEST_CASE("noiseless noise-variance estimate is near zero") {
  const int n = 30000, reps = 50;
  const SimlConfig cfg(0.49);
  const SimlBasis basis(n, cfg.m(n));
  std::vector<double> zetas(reps);
  for (int r = 0; r < reps; ++r) {
    const Eigen::ArrayXXd incr = brownian_increments(
        n, 1, 0.04, derive_seed(777, {static_cast<std::uint64_t>(r)}));
    zetas[r] = siml_qv(sample_from_increments(incr), cfg, &basis).zeta_hat(0);
  }
  CHECK(sample_mean(zetas) < 0.005);
}

TEST_CASE("pure-jump path: qv recovers the jump quadratic variation") {
  const Grid grid(20000);
  SvParams tiny{5.0, 1e-20, 0.0, 1e-20};
  const LatentPath p = simulate_univariate(
      tiny, JumpSpec::compound_poisson(10.0, 0.05, 0.30), grid, 31);
  const NoisySample s = add_noise(p, NoiseSpec(0.0), 32);
  const SimlResult res = siml_qv(s, SimlConfig(0.49));
  CHECK(res.qv(0, 0) ==
        doctest::Approx(p.truth.jump_qv(0, 0)).epsilon(0.35));
  const IvEstimate iv = integrated_volatility(s, SimlConfig(0.49), TruncationRule());
  CHECK(std::abs(iv.diag(0)) < 0.05);  // true IV ~ 0
}

TEST_CASE("zeta-hat is exactly zero on a flat noiseless sample") {
  const NoisySample s = sample_from_increments(Eigen::ArrayXXd::Zero(64, 1));
  const SimlResult res = siml_qv(s, SimlConfig(0.49));
  CHECK(res.zeta_hat(0) == 0.0);
  CHECK(res.qv(0, 0) == 0.0);
}

TEST_CASE("zeta-hat identity and scale equivariance") {
  Eigen::ArrayXXd incr = brownian_increments(2000, 1, 0.04, 55);
  incr(1000, 0) += 0.2;
  const NoisySample s = sample_from_increments(incr);
  const SimlConfig cfg(0.49);
  const SimlResult res = siml_qv(s, cfg);

  const double rv = power_variation(incr.col(0), 2.0);
  CHECK(res.zeta_raw(0) ==
        doctest::Approx(0.5 * (rv - res.qv(0, 0))).epsilon(1e-12));

  const double lambda = 3.0;
  const NoisySample scaled = sample_from_increments(lambda * incr);
  const SimlResult res2 = siml_qv(scaled, cfg);
  CHECK(res2.zeta_raw(0) ==
        doctest::Approx(lambda * lambda * res.zeta_raw(0)).epsilon(1e-12));
}

TEST_CASE("integrated volatility agrees with RV on continuous noiseless paths") {
  const Grid grid(20000);
  SvParams sv{5.0, 0.2, -0.5, 0.2};
  const LatentPath p = simulate_univariate(sv, JumpSpec::none(), grid, 61);
  const NoisySample s = add_noise(p, NoiseSpec(0.0), 62);
  const IvEstimate est = integrated_volatility(s, SimlConfig(0.49), TruncationRule());
  const SimlResult& siml = est.siml;
  // both are consistent for the integrated variance; the transform keeps
  // only m low frequencies, so allow its coarser sampling error
  const double tol = 4.0 * std::sqrt(2.0 / siml.m) * siml.rv(0);
  CHECK(std::abs(est.diag(0) - siml.rv(0)) < tol);
}
