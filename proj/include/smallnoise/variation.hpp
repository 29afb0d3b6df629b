#pragma once

#include <Eigen/Dense>
#include <vector>

#include "smallnoise/types.hpp"

namespace smallnoise {

// m_r = 2^{r/2} Gamma((r+1)/2) / Gamma(1/2), the r-th absolute moment of a
// standard normal. m_1 = sqrt(2/pi), m_2 = 1.
double gaussian_abs_moment(double r);

// sum_{i=1}^n |dx_i|^p
double power_variation(const Eigen::Ref<const Eigen::ArrayXd>& increments, double p);

// sum_{i=1}^{n-1} |dx_i|^r |dx_{i+1}|^s. Scaled variant multiplies by
// n^{(r+s)/2-1} / (m_r m_s) and is consistent for int sigma^{r+s} when the
// noise vanishes fast enough.
double bipower_variation(const Eigen::Ref<const Eigen::ArrayXd>& increments,
                         double r, double s, bool scaled = false);

// Sliding product of adjacent absolute increments raised to the given
// exponents; generalizes power (one exponent) and bipower (two).
double multipower_variation(const Eigen::Ref<const Eigen::ArrayXd>& increments,
                            const std::vector<double>& exponents,
                            bool scaled = false);

struct TruncatedRv {
  double trvc = 0.0;  // below-threshold part, continuous QV estimate
  double trvj = 0.0;  // above-threshold part, jump QV estimate
};

// Splits realized volatility at |dy_i| <=> alpha * delta^theta. The two parts
// sum to power_variation(increments, 2) by construction.
TruncatedRv truncated_rv(const Eigen::Ref<const Eigen::ArrayXd>& increments,
                         const TruncationRule& rule);

enum class TruncationSide { below, above };

// Bivariate truncated cross sum with the threshold applied to the Euclidean
// norm of the increment pair: sum dy1_i dy2_i 1{||dy_i|| <=/> alpha delta^theta}.
double bivariate_truncated_cov(const Eigen::Ref<const Eigen::ArrayXXd>& increments,
                               const TruncationRule& rule, TruncationSide side);

}  // namespace smallnoise
