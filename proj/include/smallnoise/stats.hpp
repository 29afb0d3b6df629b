#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

namespace smallnoise {

// Neumaier-compensated accumulator; the variation sums run over up to 1e5
// terms spanning many orders of magnitude.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double normal_cdf(double x);
// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley refinement); |error| < 1e-13 over (0,1).
double normal_quantile(double p);

// Kolmogorov-Smirnov sup-distance of a sample to the standard normal CDF.
// Sorts a copy of the input.
double ks_distance_normal(std::vector<double> sample);

double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // unbiased
double sample_correlation(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b);

// OLS slope of y on x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace smallnoise
