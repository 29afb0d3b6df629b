#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "smallnoise/cojump.hpp"
#include "smallnoise/paths.hpp"
#include "smallnoise/types.hpp"

namespace smallnoise {

// A fully specified data-generating process from the simulation study.
struct SimCase {
  std::string label;
  int n = 20000;
  int d = 1;
  SvParams sv1;
  SvParams sv2;
  JumpSpec jumps;
  BivariateMode mode = BivariateMode::cojump;
};

// Registry of named cases. Univariate: CJ1/CJ2 (compound Poisson jumps at
// n = 20000/30000), SJ1/SJ2 (1.5-stable jumps), cont/jump (density DGPs).
// Bivariate: C1/C2 (common jumps present), D1/D2 (disjoint jumps only).
SimCase lookup_case(const std::string& label);
const std::vector<std::string>& rmse_case_labels();
const std::vector<std::string>& sizepower_case_labels();

// Noise grids: univariate levels (i)-(iii), bivariate levels I-IV.
const std::vector<double>& univariate_noise_grid();
const std::vector<double>& bivariate_noise_grid();
std::string univariate_noise_label(int idx);
std::string bivariate_noise_label(int idx);

struct ExperimentConfig {
  std::string experiment;  // rmse | sizepower | density | order
  std::vector<std::string> cases;  // empty = all cases of the experiment
  int reps = 1000;
  std::uint64_t seed = 20250810;
  EstimatorConfig estimator;
  NoisePairing pairing = NoisePairing::theorem1;
  DenominatorPower denominator = DenominatorPower::squared;
  IngredientSet ingredients = IngredientSet::cojump_truncated;
  double level = 0.05;
  std::string out_dir;  // empty = no files written
  int threads = 0;      // 0 = hardware concurrency
  int n_override = 0;   // 0 = per-case default
};

ExperimentConfig config_from_json_file(const std::string& path);

struct RmseCell {
  std::string label, noise;
  double zeta = 0.0;
  int n = 0, reps = 0;
  double rmse_ivhat = 0.0;   // specified estimator: SIML QV - TRVJ
  double rmse_rv = 0.0;      // plain RV against true IV
  double rmse_oracle = 0.0;  // TRVC - 2*true zeta, diagnostic
  double bias_ivhat = 0.0;
  double mean_zeta_hat = 0.0;
};

struct SizePowerCell {
  std::string label, noise;
  double zeta = 0.0;
  int n = 0, reps = 0;
  double rate_corrected = 0.0, se_corrected = 0.0;
  double rate_jt = 0.0, se_jt = 0.0;
  int degenerate = 0;  // replications where the test was not applicable
};

struct DensityResult {
  std::string kind;  // cont | jump | cojump
  int n = 0, reps = 0;
  double zeta = 0.0;
  double ks_corrected = 0.0;
  double ks_uncorrected = 0.0;
  std::vector<double> z_corrected;
  std::vector<double> z_uncorrected;
};

struct OrderStudyResult {
  struct Point {
    double q;
    int n;
    double mean_abs_gap_rv, mean_abs_gap_bpv;
  };
  std::vector<Point> points;
  struct Slope {
    double q, slope_rv, slope_bpv;
  };
  std::vector<Slope> slopes;
};

std::vector<RmseCell> run_rmse(const ExperimentConfig& cfg);
std::vector<SizePowerCell> run_sizepower(const ExperimentConfig& cfg);
std::vector<DensityResult> run_density(const ExperimentConfig& cfg);
OrderStudyResult run_order_study(const ExperimentConfig& cfg);

// Corrected and no-noise-standardized test reports from shared intermediate
// work (one SIML pass, one set of raw spot-volatility paths).
struct CojumpAnalysis {
  TestReport corrected;
  TestReport jt;
};
CojumpAnalysis analyze_cojump_sample(const NoisySample& sample, double level,
                                     const EstimatorConfig& cfg, NoisePairing pairing,
                                     DenominatorPower denom, IngredientSet ingredients,
                                     const SimlBasis* basis = nullptr);

// Runs fn(0..count-1) on a small worker pool; any worker exception is
// rethrown on the caller thread after join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// Simulates one replication of a registry case (latent path + noise).
NoisySample simulate_case(const SimCase& sim, double zeta, std::uint64_t master,
                          std::uint64_t experiment_id, std::uint64_t cell_id,
                          std::uint64_t rep);

}  // namespace smallnoise
