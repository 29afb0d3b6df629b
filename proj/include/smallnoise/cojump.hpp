#pragma once

#include <cstdint>
#include <string>

#include "smallnoise/avar.hpp"
#include "smallnoise/types.hpp"

namespace smallnoise {

// S_{k,r,s}(Y) = sum_{i=1}^{[n/k]} (dY_i^{(k,1)})^r (dY_i^{(k,2)})^s over
// k-step increments dY_i^{(k,l)} = Y^l_{ik delta} - Y^l_{(i-1)k delta}.
// Only k in {1, 2} is accepted. With odd n and k = 2 the final unpaired
// increment is discarded.
double s_krs(const NoisySample& sample, int k, int r, int s);

// T = S_{2,2,2} / S_{1,2,2}; tends to 1 exactly when co-jumps are present.
double t_stat(const NoisySample& sample);

enum class TestVariant { corrected, jt };

struct TestReport {
  double t = 0.0;
  double s122 = 0.0;
  double s222 = 0.0;
  AvarReport variance;
  double z = 0.0;         // (T - 1)/sqrt(V)
  double level = 0.05;
  double critical = 0.0;  // q_{1 - level/2}
  bool reject = false;    // reject H0 (co-jumps present) when |z| >= critical
  // With truncated ingredients, zero detected co-jump mass is itself maximal
  // evidence against H0; such runs reject with z = +inf recorded.
  bool no_cojump_mass = false;
  TestVariant variant = TestVariant::corrected;
  int n = 0;
  std::uint64_t seed = 0;
};

// Two-sided co-jump test: H0 = both components jump together somewhere.
// variant jt standardizes with the noise terms zeroed out (the original
// no-noise construction). Throws DegenerateStatistic when the T statistic
// itself is undefined (S_{1,2,2} ~ 0).
TestReport cojump_test(const NoisySample& sample, double level, TestVariant variant,
                       const EstimatorConfig& cfg,
                       NoisePairing pairing = NoisePairing::theorem1,
                       DenominatorPower denom = DenominatorPower::squared,
                       IngredientSet ingredients = IngredientSet::cojump_truncated,
                       const SimlBasis* basis = nullptr);

std::string to_string(TestVariant v);

}  // namespace smallnoise
