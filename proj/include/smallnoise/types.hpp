#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smallnoise {

// Regular observation grid t_i = i/n on the unit interval.
struct Grid {
  int n = 0;

  explicit Grid(int n_increments) : n(n_increments) {
    if (n < 2) throw std::invalid_argument("Grid: n must be >= 2");
  }
  double delta() const { return 1.0 / static_cast<double>(n); }
  double time(int i) const { return static_cast<double>(i) / n; }
};

// Mean-reverting stochastic variance: dv = alpha(beta - v)dt + v dW^sigma,
// with corr(dW, dW^sigma) = rho.
struct SvParams {
  double alpha = 5.0;
  double beta = 0.2;
  double rho = -0.5;
  double v0 = 0.2;

  void validate() const {
    if (!(alpha >= 0.0) || !(beta > 0.0) || !(v0 > 0.0))
      throw std::invalid_argument("SvParams: alpha >= 0, beta > 0, v0 > 0 required");
    if (std::abs(rho) > 1.0)
      throw std::invalid_argument("SvParams: |rho| <= 1 required");
  }
};

enum class JumpKind { none, compound_poisson, stable, cojump_component };

// Jump specification. compound_poisson: Poisson(intensity) jumps with
// two-sided uniform sizes on [-hi,-lo] U [lo,hi]. stable: symmetric
// beta-stable increments. cojump_component: bivariate three-Poisson layout
// (lambda1, lambda2 idiosyncratic; lambda3 common) with centred Gaussian
// sizes of standard deviations sd1..sd4.
struct JumpSpec {
  JumpKind kind = JumpKind::none;

  double intensity = 0.0;
  double size_lo = 0.05;
  double size_hi = 0.30;

  double beta_index = 1.5;
  double scale = 1.0;

  double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
  double sd1 = 0.0, sd2 = 0.0, sd3 = 0.0, sd4 = 0.0;

  static JumpSpec none() { return {}; }
  static JumpSpec compound_poisson(double lambda, double lo, double hi) {
    JumpSpec j;
    j.kind = JumpKind::compound_poisson;
    j.intensity = lambda;
    j.size_lo = lo;
    j.size_hi = hi;
    return j;
  }
  static JumpSpec stable(double beta, double scale) {
    JumpSpec j;
    j.kind = JumpKind::stable;
    j.beta_index = beta;
    j.scale = scale;
    return j;
  }
  static JumpSpec cojump(double l1, double l2, double l3, double s1, double s2,
                         double s3, double s4) {
    JumpSpec j;
    j.kind = JumpKind::cojump_component;
    j.lambda1 = l1;
    j.lambda2 = l2;
    j.lambda3 = l3;
    j.sd1 = s1;
    j.sd2 = s2;
    j.sd3 = s3;
    j.sd4 = s4;
    return j;
  }

  void validate() const {
    if (intensity < 0.0 || lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0)
      throw std::invalid_argument("JumpSpec: intensities must be >= 0");
    if (kind == JumpKind::compound_poisson &&
        !(0.0 < size_lo && size_lo < size_hi))
      throw std::invalid_argument("JumpSpec: need 0 < size_lo < size_hi");
    if (kind == JumpKind::stable &&
        !(beta_index > 0.0 && beta_index < 2.0 && scale > 0.0))
      throw std::invalid_argument("JumpSpec: beta_index in (0,2), scale > 0");
  }
};

// Frequency-dependent observation noise: eps_m = sqrt(zeta_m) n^{-(1+2q)/2},
// so that n eps_m^2 = zeta_m n^{-2q} exactly.
struct NoiseSpec {
  Eigen::VectorXd zeta;  // one entry per component
  double q = 0.0;

  NoiseSpec() = default;
  explicit NoiseSpec(double z, double q_rate = 0.0) : zeta(1), q(q_rate) { zeta << z; }
  static NoiseSpec bivariate(double z1, double z2, double q_rate = 0.0) {
    NoiseSpec n;
    n.zeta.resize(2);
    n.zeta << z1, z2;
    n.q = q_rate;
    return n;
  }

  double eps(int n, int component) const {
    return std::sqrt(zeta(component)) *
           std::pow(static_cast<double>(n), -(1.0 + 2.0 * q) / 2.0);
  }
  void validate() const {
    if ((zeta.array() < 0.0).any() || q < 0.0)
      throw std::invalid_argument("NoiseSpec: zeta >= 0 and q >= 0 required");
  }
};

// One recorded jump: grid cell (1-based increment index), per-component
// sizes, spot covariance at the cell left endpoint.
struct JumpRecord {
  int cell = 0;
  double dx1 = 0.0;
  double dx2 = 0.0;  // 0 for univariate paths
  double c11 = 0.0;
  double c22 = 0.0;
};

// Ground-truth functionals recorded by the simulator.
struct PathTruth {
  Eigen::Matrix2d iv = Eigen::Matrix2d::Zero();         // int c^{(l,m)} ds
  Eigen::Matrix2d iq = Eigen::Matrix2d::Zero();         // int (c^{(l,m)})^2 ds
  Eigen::Matrix2d jump_qv = Eigen::Matrix2d::Zero();    // sum dX^l dX^m over jumps
  double s0 = 0.0;                                      // sum (dX1)^2 (dX2)^2
  double j42 = 0.0;                                     // sum (dX1)^4 (dX2)^2
  double j24 = 0.0;                                     // sum (dX1)^2 (dX2)^4
  double f22 = 0.0;                                     // F^{(1,2)}(2,2)
  double d11 = 0.0;                                     // sum c^{(1,1)} (dX1)^2
  std::vector<JumpRecord> jumps;
};

// Simulated latent log-price path on the grid, with truth record.
struct LatentPath {
  Grid grid;
  int d = 1;
  Eigen::ArrayXXd x;  // (n+1) x d
  PathTruth truth;

  LatentPath(Grid g, int dim) : grid(g), d(dim), x(g.n + 1, dim) { x.setZero(); }
};

// Observed path y = x + eps v, with the latent path retained for oracle use.
struct NoisySample {
  LatentPath latent;
  Eigen::ArrayXXd y;  // (n+1) x d
  NoiseSpec noise;
  std::uint64_t seed = 0;

  int n() const { return latent.grid.n; }
  int d() const { return latent.d; }
  // increment matrix, n x d, row i = y_{t_{i+1}} - y_{t_i}
  Eigen::ArrayXXd increments() const {
    const int nn = n();
    return y.bottomRows(nn) - y.topRows(nn);
  }
};

// Truncation rule for separating diffusion-scale and jump-scale increments.
struct TruncationRule {
  double alpha = 2.0;
  double theta = 0.48;

  TruncationRule() = default;
  TruncationRule(double a, double t) : alpha(a), theta(t) { validate(); }
  void validate() const {
    if (!(alpha > 0.0) || !(theta > 0.0 && theta < 0.5))
      throw std::invalid_argument("TruncationRule: alpha > 0, theta in (0,1/2)");
  }
  double threshold(int n) const {
    return alpha * std::pow(1.0 / static_cast<double>(n), theta);
  }
};

// SIML frequency cutoff m_n = floor(n^p), 0 < p < 1/2.
struct SimlConfig {
  double p = 0.49;

  SimlConfig() = default;
  explicit SimlConfig(double exponent) : p(exponent) { validate(); }
  void validate() const {
    if (!(p > 0.0 && p < 0.5))
      throw std::invalid_argument("SimlConfig: p in (0, 1/2) required");
  }
  int m(int n) const {
    const int mn = static_cast<int>(std::floor(std::pow(static_cast<double>(n), p)));
    return mn < 1 ? 1 : mn;
  }
};

// Local window k_n = ceil(c n^gamma) for spot-volatility estimation.
struct WindowRule {
  double c = 1.0;
  double gamma = 0.5;

  int k(int n) const {
    const int kn = static_cast<int>(
        std::ceil(c * std::pow(static_cast<double>(n), gamma)));
    return kn < 1 ? 1 : kn;
  }
};

// Tuning constants the estimators leave to the user.
struct EstimatorConfig {
  SimlConfig siml;
  TruncationRule trunc;
  WindowRule window;
};

}  // namespace smallnoise
