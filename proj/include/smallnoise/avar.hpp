#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "smallnoise/siml.hpp"
#include "smallnoise/types.hpp"

namespace smallnoise {

// Thrown when a statistic is undefined on the given sample (e.g. no detected
// co-jump mass); carries the offending values in the message.
class DegenerateStatistic : public std::runtime_error {
 public:
  explicit DegenerateStatistic(const std::string& what) : std::runtime_error(what) {}
};

// Local-window spot covariance path. Entry i-1 (0-based) holds
//   c_i^{(l,m)} = (1/(#I_n(i) delta)) sum_{j in I_n(i)} dY_j^l dY_j^m 1{||dY_j|| <= thr}
//                 - 2 delta_{lm} sqrt(zeta_l zeta_m),
// with I_n(i) = {j != i, 1 <= j <= n, |i-j| <= k_n} and the diagonal floored
// at 0. The window is normalized by the actual cell count, which removes the
// boundary bias of the nominal 1/(2 k_n delta) normalization.
Eigen::ArrayXd spot_cov_path(const Eigen::Ref<const Eigen::ArrayXXd>& increments,
                             int comp_l, int comp_m, const WindowRule& window,
                             const TruncationRule& trunc, double noise_correction);

// Single-cell accessor, 1-based cell index.
double spot_vol(const NoisySample& sample, int cell, int comp_l, int comp_m,
                const WindowRule& window, const TruncationRule& trunc,
                const Eigen::VectorXd& zeta_hat);

// A^{(l,m)}(r) estimate: delta * sum_{i=1}^{n-k_n+1} (c_i^{(l,m)})^r,
// consistent for int (c^{(l,m)})^r ds. r is the power of c, so r=1 targets
// the integrated (co)variance and r=2 the quarticity.
double a_hat(const NoisySample& sample, int comp_l, int comp_m, int r,
             const WindowRule& window, const TruncationRule& trunc,
             const Eigen::VectorXd& zeta_hat);

// D^{(l,m)}_{p,q}(r,s) estimate for r,s >= 2:
//   sum_i (dY_i^l)^r (dY_i^m)^s c_i^{(p,q)}   (signed powers).
double d_hat(const NoisySample& sample, int comp_l, int comp_m, int comp_p,
             int comp_q, int r, int s, const WindowRule& window,
             const TruncationRule& trunc, const Eigen::VectorXd& zeta_hat);

// D(1,1) estimate: sum_i c_i^{(p,q)} (dY_i^l)(dY_i^m) 1{||dY_i|| > thr}.
double d_hat_11(const NoisySample& sample, int comp_l, int comp_m, int comp_p,
                int comp_q, const WindowRule& window, const TruncationRule& trunc,
                const Eigen::VectorXd& zeta_hat);

// Raw cross power sum J^{(l,m)}(r,s) = sum_i (dY_i^l)^r (dY_i^m)^s, r,s >= 2.
double j_hat(const NoisySample& sample, int comp_l, int comp_m, int r, int s);

// Low-level kernels shared by the estimators and the Monte Carlo drivers.
// sum_i (dY_i^l)^r (dY_i^m)^s w_i, signed powers.
double weighted_power_sum(const Eigen::Ref<const Eigen::ArrayXXd>& increments,
                          int comp_l, int comp_m, int r, int s,
                          const Eigen::ArrayXd& weights);
double power_sum(const Eigen::Ref<const Eigen::ArrayXXd>& increments, int comp_l,
                 int comp_m, int r, int s);

// F^{(l,m)}(r,s) = r^2 D_{l,l}(2(r-1), 2s) + 2rs D_{l,m}(2r-1, 2s-1)
//                + s^2 D_{m,m}(2r, 2(s-1)).
double f_hat(const NoisySample& sample, int comp_l, int comp_m, int r, int s,
             const WindowRule& window, const TruncationRule& trunc,
             const Eigen::VectorXd& zeta_hat);

enum class RvAvarMode { continuous, jump };
enum class NoisePairing { theorem1, printed };
enum class DenominatorPower { squared, printed };

// How the jump-functional ingredients of the co-jump variance are summed.
// plain: raw power sums over all cells. cojump_truncated: restricted to
// cells where both components exceed the truncation threshold (detected
// common jumps). The plain sums are dominated by diffusion-noise products
// when no common jumps exist, which keeps the variance estimate O(1) under
// the alternative and destroys the test's consistency; the truncated sums
// vanish there, so the standardized statistic diverges as it should.
enum class IngredientSet { plain, cojump_truncated };

struct AvarReport {
  std::string which;  // "Vc", "Vj", "Vj12", "Vjt"
  double value = 0.0;
  bool floored = false;  // negative estimate floored at 0
  bool no_mass = false;  // no co-jump mass detected (J(2,2) ~ 0)
  // ingredients
  Eigen::VectorXd zeta_hat;
  double a1 = 0.0, a2 = 0.0;           // int sigma^2 / int sigma^4 estimates
  double d11 = 0.0;                    // D(1,1) estimate
  double qv = 0.0;                     // SIML QV (component 1,1)
  double f22 = 0.0, j22 = 0.0, j42 = 0.0, j24 = 0.0;
};

// Asymptotic variance of RV under small noise. continuous:
//   Vc = (2 A^(int s^4) + 8 zeta A^(int s^2) + 12 zeta^2)/n,
// jump-robust:
//   Vj = (2 A^(int s^4) + 4 D(1,1) + 8 zeta [X,X]_SIML)/n.
// zeta_override (e.g. 0 for a no-correction standardization) replaces both
// the noise terms and the spot-volatility correction.
AvarReport rv_avar(const NoisySample& sample, RvAvarMode mode, const SimlConfig& cfg,
                   const WindowRule& window, const TruncationRule& trunc,
                   std::optional<Eigen::VectorXd> zeta_override = std::nullopt,
                   const SimlBasis* basis = nullptr);

// Asymptotic variance of the co-jump test statistic (d = 2):
//   V = [F(2,2) + 8(zeta2 J(4,2) + zeta1 J(2,4))] / (n J(2,2)^2)
// under the default pairing/denominator; the printed variants swap the zeta
// pairing and drop the square. Throws DegenerateStatistic when J(2,2) is
// numerically zero.
AvarReport cojump_avar(const NoisySample& sample, const SimlConfig& cfg,
                       const WindowRule& window, const TruncationRule& trunc,
                       NoisePairing pairing = NoisePairing::theorem1,
                       DenominatorPower denom = DenominatorPower::squared,
                       IngredientSet ingredients = IngredientSet::plain,
                       std::optional<Eigen::VectorXd> zeta_override = std::nullopt,
                       const SimlBasis* basis = nullptr);

// Bias-corrected and zeta=0 standardizations of the RV variance from one
// SIML pass and one raw spot-volatility path.
struct RvAnalysis {
  SimlResult siml;
  AvarReport corrected;
  AvarReport uncorrected;
};
RvAnalysis analyze_rv_sample(const NoisySample& sample, RvAvarMode mode,
                             const SimlConfig& cfg, const WindowRule& window,
                             const TruncationRule& trunc,
                             const SimlBasis* basis = nullptr);

// Corrected and zeta=0 co-jump variances from shared intermediates.
struct CojumpVariancePair {
  SimlResult siml;
  AvarReport corrected;
  AvarReport jt;
};
CojumpVariancePair cojump_avar_pair(const NoisySample& sample, const SimlConfig& cfg,
                                    const WindowRule& window,
                                    const TruncationRule& trunc, NoisePairing pairing,
                                    DenominatorPower denom, IngredientSet ingredients,
                                    const SimlBasis* basis = nullptr);

}  // namespace smallnoise
