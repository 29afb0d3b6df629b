#include "smallnoise/variation.hpp"

#include <cmath>
#include <stdexcept>

#include "smallnoise/stats.hpp"

namespace smallnoise {

double gaussian_abs_moment(double r) {
  if (r < 0.0) throw std::invalid_argument("gaussian_abs_moment: r >= 0 required");
  return std::pow(2.0, r / 2.0) * std::tgamma((r + 1.0) / 2.0) / std::tgamma(0.5);
}

double power_variation(const Eigen::Ref<const Eigen::ArrayXd>& increments, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("power_variation: p > 0 required");
  if (increments.size() < 1)
    throw std::invalid_argument("power_variation: need at least one increment");
  CompensatedSum s;
  if (p == 2.0) {
    for (Eigen::Index i = 0; i < increments.size(); ++i)
      s.add(increments(i) * increments(i));
  } else {
    for (Eigen::Index i = 0; i < increments.size(); ++i)
      s.add(std::pow(std::abs(increments(i)), p));
  }
  return s.value();
}

double bipower_variation(const Eigen::Ref<const Eigen::ArrayXd>& increments,
                         double r, double s, bool scaled) {
  if (!(r > 0.0) || !(s > 0.0))
    throw std::invalid_argument("bipower_variation: r, s > 0 required");
  const Eigen::Index n = increments.size();
  if (n < 2) throw std::invalid_argument("bipower_variation: need n >= 2");
  CompensatedSum acc;
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    acc.add(std::pow(std::abs(increments(i)), r) *
            std::pow(std::abs(increments(i + 1)), s));
  double v = acc.value();
  if (scaled)
    v *= std::pow(static_cast<double>(n), (r + s) / 2.0 - 1.0) /
         (gaussian_abs_moment(r) * gaussian_abs_moment(s));
  return v;
}

double multipower_variation(const Eigen::Ref<const Eigen::ArrayXd>& increments,
                            const std::vector<double>& exponents, bool scaled) {
  if (exponents.empty())
    throw std::invalid_argument("multipower_variation: empty exponent list");
  for (double p : exponents)
    if (!(p > 0.0))
      throw std::invalid_argument("multipower_variation: exponents must be > 0");
  const Eigen::Index n = increments.size();
  const Eigen::Index len = static_cast<Eigen::Index>(exponents.size());
  if (n < len)
    throw std::invalid_argument("multipower_variation: more exponents than increments");

  CompensatedSum acc;
  for (Eigen::Index i = 0; i + len <= n; ++i) {
    double term = 1.0;
    for (Eigen::Index k = 0; k < len; ++k)
      term *= std::pow(std::abs(increments(i + k)), exponents[k]);
    acc.add(term);
  }
  double v = acc.value();
  if (scaled) {
    double psum = 0.0, mprod = 1.0;
    for (double p : exponents) {
      psum += p;
      mprod *= gaussian_abs_moment(p);
    }
    v *= std::pow(static_cast<double>(n), psum / 2.0 - 1.0) / mprod;
  }
  return v;
}

TruncatedRv truncated_rv(const Eigen::Ref<const Eigen::ArrayXd>& increments,
                         const TruncationRule& rule) {
  rule.validate();
  const double thr = rule.threshold(static_cast<int>(increments.size()));
  CompensatedSum below, above;
  for (Eigen::Index i = 0; i < increments.size(); ++i) {
    const double d = increments(i);
    if (std::abs(d) <= thr)
      below.add(d * d);
    else
      above.add(d * d);
  }
  return {below.value(), above.value()};
}

double bivariate_truncated_cov(const Eigen::Ref<const Eigen::ArrayXXd>& increments,
                               const TruncationRule& rule, TruncationSide side) {
  if (increments.cols() != 2)
    throw std::invalid_argument("bivariate_truncated_cov: d = 2 required");
  rule.validate();
  const double thr = rule.threshold(static_cast<int>(increments.rows()));
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < increments.rows(); ++i) {
    const double d1 = increments(i, 0), d2 = increments(i, 1);
    const double norm = std::sqrt(d1 * d1 + d2 * d2);
    const bool below = norm <= thr;
    if ((side == TruncationSide::below) == below) acc.add(d1 * d2);
  }
  return acc.value();
}

}  // namespace smallnoise
