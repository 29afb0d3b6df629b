#include "smallnoise/siml.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smallnoise/variation.hpp"

namespace smallnoise {

double siml_eigenvalue(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("siml_eigenvalue: 1 <= k <= n");
  return 2.0 * (1.0 - std::cos(std::numbers::pi * (2.0 * k - 1.0) / (2.0 * n + 1.0)));
}

Eigen::MatrixXd siml_projection_matrix(int n) {
  Eigen::MatrixXd p(n, n);
  const double amp = std::sqrt(2.0 / (n + 0.5));
  const double freq = 2.0 * std::numbers::pi / (2.0 * n + 1.0);
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= n; ++k)
      p(j - 1, k - 1) = amp * std::cos(freq * (k - 0.5) * (j - 0.5));
  return p;
}

Eigen::MatrixXd cumulation_inverse(int n) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    if (i > 0) c(i, i - 1) = -1.0;
  }
  return c;
}

SimlBasis::SimlBasis(int n, int m) : n_(n), m_(m) {
  if (m < 1 || m > n) throw std::invalid_argument("SimlBasis: need 1 <= m <= n");
  rows_.resize(m, n);
  const double amp = std::sqrt(2.0 / (n + 0.5)) * std::sqrt(static_cast<double>(n));
  const double freq = 2.0 * std::numbers::pi / (2.0 * n + 1.0);
  for (int k = 1; k <= m; ++k) {
    const double wk = freq * (k - 0.5);
    for (int j = 1; j <= n; ++j) rows_(k - 1, j - 1) = amp * std::cos(wk * (j - 0.5));
  }
}

Eigen::MatrixXd SimlBasis::transform(
    const Eigen::Ref<const Eigen::MatrixXd>& increments) const {
  if (increments.rows() != n_)
    throw std::invalid_argument("SimlBasis::transform: increment count != n");
  return rows_ * increments;
}

Eigen::MatrixXd siml_transform(const Eigen::Ref<const Eigen::MatrixXd>& increments,
                               int m) {
  SimlBasis basis(static_cast<int>(increments.rows()), m);
  return basis.transform(increments);
}

SimlResult siml_qv(const NoisySample& sample, const SimlConfig& cfg,
                   const SimlBasis* basis) {
  cfg.validate();
  const int n = sample.n();
  const int d = sample.d();
  if (n < 4) throw std::invalid_argument("siml_qv: n >= 4 required");
  const int m = cfg.m(n);

  const Eigen::ArrayXXd incr = sample.increments();
  Eigen::MatrixXd z;
  if (basis != nullptr) {
    if (basis->n() != n || basis->m() != m)
      throw std::invalid_argument("siml_qv: basis does not match (n, m)");
    z = basis->transform(incr.matrix());
  } else {
    z = siml_transform(incr.matrix(), m);
  }

  SimlResult res;
  res.m = m;
  Eigen::MatrixXd qv = (z.transpose() * z) / static_cast<double>(m);
  qv = 0.5 * (qv + qv.transpose()).eval();  // guard rounding asymmetry
  for (int i = 0; i < d; ++i) {
    if (qv(i, i) < 0.0) {
      qv(i, i) = 0.0;
      res.diag_clipped = true;
    }
  }
  res.qv = qv;

  res.rv.resize(d);
  res.zeta_raw.resize(d);
  res.zeta_hat.resize(d);
  for (int mcomp = 0; mcomp < d; ++mcomp) {
    res.rv(mcomp) = power_variation(incr.col(mcomp), 2.0);
    res.zeta_raw(mcomp) = 0.5 * (res.rv(mcomp) - qv(mcomp, mcomp));
    if (res.zeta_raw(mcomp) < 0.0) {
      res.zeta_hat(mcomp) = 0.0;
      res.zeta_floored = true;
    } else {
      res.zeta_hat(mcomp) = res.zeta_raw(mcomp);
    }
  }
  return res;
}

Eigen::VectorXd noise_variance(const NoisySample& sample, const SimlConfig& cfg,
                               const SimlBasis* basis) {
  return siml_qv(sample, cfg, basis).zeta_hat;
}

IvEstimate integrated_volatility(const NoisySample& sample, const SimlConfig& cfg,
                                 const TruncationRule& rule, const SimlBasis* basis) {
  IvEstimate est;
  est.siml = siml_qv(sample, cfg, basis);
  const int d = sample.d();
  const Eigen::ArrayXXd incr = sample.increments();

  est.diag.resize(d);
  for (int m = 0; m < d; ++m) {
    const TruncatedRv trv = truncated_rv(incr.col(m), rule);
    est.diag(m) = est.siml.qv(m, m) - trv.trvj;
  }
  if (d == 2)
    est.cross = est.siml.qv(0, 1) -
                bivariate_truncated_cov(incr, rule, TruncationSide::above);
  return est;
}

}  // namespace smallnoise
