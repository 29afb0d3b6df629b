#include "smallnoise/cojump.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "smallnoise/stats.hpp"

namespace smallnoise {

double s_krs(const NoisySample& sample, int k, int r, int s) {
  if (sample.d() != 2) throw std::invalid_argument("s_krs: d = 2 required");
  if (k != 1 && k != 2) throw std::invalid_argument("s_krs: k must be 1 or 2");
  const int n = sample.n();
  if (n < k) throw std::invalid_argument("s_krs: n >= k required");

  const int blocks = n / k;
  CompensatedSum acc;
  for (int i = 1; i <= blocks; ++i) {
    const double d1 = sample.y(i * k, 0) - sample.y((i - 1) * k, 0);
    const double d2 = sample.y(i * k, 1) - sample.y((i - 1) * k, 1);
    acc.add(std::pow(d1, r) * std::pow(d2, s));
  }
  return acc.value();
}

double t_stat(const NoisySample& sample) {
  const double s1 = s_krs(sample, 1, 2, 2);
  if (s1 == 0.0)
    throw DegenerateStatistic("t_stat: S_{1,2,2} = 0, ratio undefined");
  return s_krs(sample, 2, 2, 2) / s1;
}

TestReport cojump_test(const NoisySample& sample, double level, TestVariant variant,
                       const EstimatorConfig& cfg, NoisePairing pairing,
                       DenominatorPower denom, IngredientSet ingredients,
                       const SimlBasis* basis) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("cojump_test: level in (0,1) required");

  TestReport rep;
  rep.variant = variant;
  rep.level = level;
  rep.n = sample.n();
  rep.seed = sample.seed;
  rep.s122 = s_krs(sample, 1, 2, 2);
  rep.s222 = s_krs(sample, 2, 2, 2);
  rep.critical = normal_quantile(1.0 - level / 2.0);
  if (std::abs(rep.s122) < 1e-12) {
    std::ostringstream msg;
    msg << "cojump_test: T undefined (S_{1,2,2} = " << rep.s122 << ")";
    throw DegenerateStatistic(msg.str());
  }
  rep.t = rep.s222 / rep.s122;

  std::optional<Eigen::VectorXd> zeta_override;
  if (variant == TestVariant::jt) zeta_override = Eigen::VectorXd::Zero(2);
  try {
    rep.variance = cojump_avar(sample, cfg.siml, cfg.window, cfg.trunc, pairing,
                               denom, ingredients, zeta_override, basis);
  } catch (const DegenerateStatistic&) {
    rep.no_cojump_mass = true;
    rep.z = std::numeric_limits<double>::infinity();
    rep.reject = true;
    return rep;
  }
  if (!(rep.variance.value > 0.0)) {
    std::ostringstream msg;
    msg << "cojump_test: degenerate variance estimate (V = " << rep.variance.value
        << ", F22 = " << rep.variance.f22 << ", J22 = " << rep.variance.j22 << ")";
    throw DegenerateStatistic(msg.str());
  }

  rep.z = (rep.t - 1.0) / std::sqrt(rep.variance.value);
  rep.reject = std::abs(rep.z) >= rep.critical;
  return rep;
}

std::string to_string(TestVariant v) {
  return v == TestVariant::corrected ? "corrected" : "jt";
}

}  // namespace smallnoise
