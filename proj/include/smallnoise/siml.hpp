#pragma once

#include <Eigen/Dense>

#include "smallnoise/types.hpp"

namespace smallnoise {

// k-th eigenvalue of C_n^{-1} C_n^{-T}: d_k = 2[1 - cos(pi (2k-1)/(2n+1))].
double siml_eigenvalue(int n, int k);

// Full n x n orthogonal cosine basis
// p_{jk} = sqrt(2/(n+1/2)) cos[ 2pi/(2n+1) (k-1/2)(j-1/2) ]; symmetric.
Eigen::MatrixXd siml_projection_matrix(int n);

// Lower-triangular cumulation matrix inverse: 1 on the diagonal, -1 below.
Eigen::MatrixXd cumulation_inverse(int n);

// The first m rows of the projection applied to increments, scaled by
// delta^{-1/2}: row k = sqrt(n) * sum_j p_{kj} dY_j. Cache one of these per
// (n, m) and share it across replications; building it costs m*n cosine
// evaluations, applying it is a plain matrix product.
class SimlBasis {
 public:
  SimlBasis(int n, int m);
  int n() const { return n_; }
  int m() const { return m_; }
  // increments: n x d. Returns m x d.
  Eigen::MatrixXd transform(const Eigen::Ref<const Eigen::MatrixXd>& increments) const;

 private:
  int n_, m_;
  Eigen::MatrixXd rows_;  // m x n, already scaled by sqrt(n)
};

// Free-function form; builds a basis on the fly.
Eigen::MatrixXd siml_transform(const Eigen::Ref<const Eigen::MatrixXd>& increments,
                               int m);

struct SimlResult {
  Eigen::MatrixXd qv;         // d x d, symmetric, diagonal >= 0
  Eigen::VectorXd zeta_hat;   // floored at 0
  Eigen::VectorXd zeta_raw;   // pre-floor value 0.5 (RV - qv_mm)
  Eigen::VectorXd rv;         // realized volatility per component
  int m = 0;
  bool diag_clipped = false;  // a tiny negative diagonal entry was clipped
  bool zeta_floored = false;  // a negative zeta estimate was floored
};

// Quadratic-variation estimate (1/m) sum_{k<=m} z_k z_k^T together with the
// noise-variance estimates zeta_m = max(0, (RV_m - qv_mm)/2). Pass a
// prebuilt basis matching (n, m) to skip rebuilding it.
SimlResult siml_qv(const NoisySample& sample, const SimlConfig& cfg,
                   const SimlBasis* basis = nullptr);

Eigen::VectorXd noise_variance(const NoisySample& sample, const SimlConfig& cfg,
                               const SimlBasis* basis = nullptr);

struct IvEstimate {
  Eigen::VectorXd diag;   // qv_mm - trvj_m per component
  double cross = 0.0;     // d = 2 only: qv_12 minus above-threshold cov
  SimlResult siml;
};

// Jump- and noise-robust integrated (co)volatility: SIML QV minus the
// truncated jump part.
IvEstimate integrated_volatility(const NoisySample& sample, const SimlConfig& cfg,
                                 const TruncationRule& rule,
                                 const SimlBasis* basis = nullptr);

}  // namespace smallnoise
