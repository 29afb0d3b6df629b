// Acceptance suite: one pass/fail line per criterion, full Monte Carlo sizes.
// Run with --quick for a fast smoke pass (N reduced; thresholds unchanged).

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "smallnoise/cojump.hpp"
#include "smallnoise/experiments.hpp"
#include "smallnoise/io.hpp"
#include "smallnoise/siml.hpp"
#include "smallnoise/stats.hpp"
#include "smallnoise/variation.hpp"
#include "test_helpers.hpp"

using namespace smallnoise;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  [" << criterion << "] " << what
            << "  --  " << detail << "\n";
  if (!pass) ++g_failures;
}

struct Options {
  int reps_full = 1000;
  int reps_cons = 200;
  int reps_order = 100;
  std::uint64_t seed = 20250810;
  int threads = 0;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

// ---- criterion 1: integrated-volatility RMSE table ------------------------

void criterion_rmse(const Options& opt) {
  ExperimentConfig cfg;
  cfg.experiment = "rmse";
  cfg.reps = opt.reps_full;
  cfg.seed = opt.seed;
  cfg.threads = opt.threads;
  const auto table = run_rmse(cfg);

  const std::map<std::string, double> printed = {
      {"CJ1-i", 2.137e-3},  {"CJ1-ii", 2.192e-3}, {"CJ1-iii", 2.349e-3},
      {"CJ2-i", 1.701e-3},  {"CJ2-ii", 1.735e-3}, {"CJ2-iii", 1.878e-3},
      {"SJ1-i", 11.45e-3},  {"SJ1-ii", 11.47e-3}, {"SJ1-iii", 11.40e-3},
      {"SJ2-i", 9.501e-3},  {"SJ2-ii", 9.496e-3}, {"SJ2-iii", 9.470e-3}};

  bool all = true;
  std::string detail;
  for (const auto& cell : table) {
    const std::string key = cell.label + "-" + cell.noise;
    const double target = printed.at(key);
    const double tol = cell.label[0] == 'S' ? 0.25 : 0.20;
    const bool ok = std::abs(cell.rmse_ivhat - target) <= tol * target;
    if (!ok && detail.size() < 240)
      detail += key + "=" + fmt(cell.rmse_ivhat * 1e3) + " (printed " +
                fmt(target * 1e3) + ", oracle-corrected RV gives " +
                fmt(cell.rmse_oracle * 1e3) + ") ";
    all = all && ok;
  }
  if (all) detail = "all 12 cells within tolerance";
  report(1, all, "Table 1 RMSE of the jump- and noise-robust IV estimator",
         detail);
}

// ---- criteria 2-4: size and power table ------------------------------------

void criteria_sizepower(const Options& opt) {
  ExperimentConfig cfg;
  cfg.experiment = "sizepower";
  cfg.reps = opt.reps_full;
  cfg.seed = opt.seed;
  cfg.threads = opt.threads;
  const auto table = run_sizepower(cfg);

  std::map<std::string, SizePowerCell> cells;
  for (const auto& c : table) cells[c.label + "-" + c.noise] = c;

  const std::map<std::string, double> printed_size = {
      {"C1-I", 0.068}, {"C1-II", 0.064}, {"C1-III", 0.065}, {"C1-IV", 0.071},
      {"C2-I", 0.058}, {"C2-II", 0.053}, {"C2-III", 0.052}, {"C2-IV", 0.046}};

  bool size_ok = true;
  std::string size_detail;
  for (const auto& [key, target] : printed_size) {
    const double got = cells.at(key).rate_corrected;
    const bool ok = std::abs(got - target) <= 0.02;
    if (!ok) size_detail += key + "=" + fmt(got) + " (printed " + fmt(target) + ") ";
    size_ok = size_ok && ok;
  }
  if (size_ok) size_detail = "all eight C cells within +/-0.02 of printed";
  report(2, size_ok, "Table 2 empirical size, corrected test", size_detail);

  const double jt1 = cells.at("C1-IV").rate_jt, jt2 = cells.at("C2-IV").rate_jt;
  const double co1 = cells.at("C1-IV").rate_corrected,
               co2 = cells.at("C2-IV").rate_corrected;
  const bool jt_ok = jt1 >= 0.18 && jt2 >= 0.18 && co1 <= 0.09 && co2 <= 0.09;
  report(3, jt_ok, "Table 2 noise sensitivity at level IV",
         "jt C1-IV=" + fmt(jt1) + " C2-IV=" + fmt(jt2) + " (need >= 0.18); corrected " +
             fmt(co1) + ", " + fmt(co2) + " (need <= 0.09)");

  bool power_ok = true;
  std::string power_detail;
  for (const std::string label : {"D1", "D2"})
    for (const std::string noise : {"I", "II", "III", "IV"}) {
      const double got = cells.at(label + "-" + noise).rate_corrected;
      if (got < 0.95) {
        power_ok = false;
        power_detail += label + "-" + noise + "=" + fmt(got) + " ";
      }
    }
  if (power_ok) power_detail = "all eight D cells >= 0.95";
  report(4, power_ok, "Table 2 power, corrected test", power_detail);
}

// ---- criterion 5: density / KS properties ----------------------------------

void criterion_density(const Options& opt) {
  ExperimentConfig cfg;
  cfg.experiment = "density";
  cfg.reps = opt.reps_full;
  cfg.seed = opt.seed;
  cfg.threads = opt.threads;
  const auto results = run_density(cfg);

  std::map<std::string, DensityResult> by_kind;
  for (const auto& r : results) by_kind[r.kind] = r;
  const auto& cont = by_kind.at("cont");
  const auto& jump = by_kind.at("jump");
  const auto& cj = by_kind.at("cojump");

  const bool ok = cont.ks_corrected < 0.05 && jump.ks_corrected < 0.06 &&
                  cj.ks_corrected < 0.06 &&
                  cont.ks_corrected < cont.ks_uncorrected;
  report(5, ok, "standardized statistics approach the standard normal",
         "KS cont corrected=" + fmt(cont.ks_corrected) + " (<0.05), uncorrected=" +
             fmt(cont.ks_uncorrected) + "; jump corrected=" + fmt(jump.ks_corrected) +
             " (<0.06); cojump z=" + fmt(cj.ks_corrected) + " (<0.06)");
}

// ---- criterion 6: exact identities -----------------------------------------

void criterion_identities(const Options&) {
  bool ok = true;
  std::string detail;

  // TRVC + TRVJ = RV on 1000 random sequences
  {
    Xoshiro256pp rng(4242);
    NormalSampler normal;
    const TruncationRule rule;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 10 + static_cast<int>(rng.next() % 500);
      Eigen::ArrayXd dx(n);
      for (int i = 0; i < n; ++i) {
        dx(i) = 1e-3 * normal(rng);
        if (rng.uniform() < 0.01) dx(i) += normal(rng);
      }
      const TruncatedRv trv = truncated_rv(dx, rule);
      const double rv = power_variation(dx, 2.0);
      worst = std::max(worst,
                       std::abs(trv.trvc + trv.trvj - rv) / std::max(1.0, rv));
    }
    if (worst > 1e-12) ok = false;
    detail += "partition residual " + fmt(worst, 2) + "; ";
  }

  // spectral identity for n = 2..8
  {
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
      const Eigen::MatrixXd p = siml_projection_matrix(n);
      const Eigen::MatrixXd cinv = cumulation_inverse(n);
      Eigen::VectorXd d(n);
      for (int k = 1; k <= n; ++k) d(k - 1) = siml_eigenvalue(n, k);
      worst = std::max(worst, (cinv * cinv.transpose() -
                               p * d.asDiagonal() * p.transpose())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    if (worst > 1e-10) ok = false;
    detail += "spectral residual " + fmt(worst, 2) + "; ";
  }

  // T = 8 on the constant-increment path
  {
    const NoisySample s = smallnoise::testing::sample_from_increments(
        Eigen::ArrayXXd::Constant(2000, 2, 0.01));
    const double t = t_stat(s);
    if (std::abs(t - 8.0) > 1e-12) ok = false;
    detail += "T=" + fmt(t, 10) + "; ";
  }

  // s_krs against a brute-force double loop
  {
    Xoshiro256pp rng(777);
    NormalSampler normal;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 11 + static_cast<int>(rng.next() % 200);
      Eigen::ArrayXXd incr(n, 2);
      for (int i = 0; i < n; ++i) {
        incr(i, 0) = normal(rng);
        incr(i, 1) = normal(rng);
      }
      const NoisySample s = smallnoise::testing::sample_from_increments(incr);
      for (int k : {1, 2}) {
        double slow = 0.0;
        for (int i = 1; i <= n / k; ++i) {
          const double d1 = s.y(i * k, 0) - s.y((i - 1) * k, 0);
          const double d2 = s.y(i * k, 1) - s.y((i - 1) * k, 1);
          slow += d1 * d1 * d2 * d2;
        }
        const double fast = s_krs(s, k, 2, 2);
        worst = std::max(worst, std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
      }
    }
    if (worst > 1e-12) ok = false;
    detail += "s_krs residual " + fmt(worst, 2);
  }

  report(6, ok, "exact identities", detail);
}

// ---- criterion 7: estimator consistency at desk scale ----------------------

void criterion_consistency(const Options& opt) {
  bool ok = true;
  std::string detail;

  // zeta-hat mean within 15% of 1e-2 at n = 30000
  {
    const int n = 30000, reps = opt.reps_cons;
    const double zeta = 1e-2, sigma2 = 0.04;
    const SimlConfig cfg(0.49);
    const SimlBasis basis(n, cfg.m(n));
    std::vector<double> zetas(reps);
    parallel_for(reps, opt.threads, [&](int r) {
      const Eigen::ArrayXXd incr = smallnoise::testing::brownian_increments(
          n, 1, sigma2, derive_seed(opt.seed, {91, static_cast<std::uint64_t>(r)}));
      LatentPath latent{Grid(n), 1};
      for (int i = 0; i < n; ++i) latent.x(i + 1, 0) = latent.x(i, 0) + incr(i, 0);
      const NoisySample s = add_noise(
          latent, NoiseSpec(zeta), derive_seed(opt.seed, {92, static_cast<std::uint64_t>(r)}));
      zetas[r] = siml_qv(s, cfg, &basis).zeta_hat(0);
    });
    const double mean = sample_mean(zetas);
    if (std::abs(mean - zeta) > 0.15 * zeta) ok = false;
    detail += "mean zeta-hat=" + fmt(mean) + " (true 0.01); ";
  }

  // scaled bipower within 5% of int sigma^2 (= 0.04) at n = 20000
  {
    const int n = 20000, reps = opt.reps_cons;
    const double sigma2 = 0.04;
    std::vector<double> bpv(reps);
    parallel_for(reps, opt.threads, [&](int r) {
      const Eigen::ArrayXXd incr = smallnoise::testing::brownian_increments(
          n, 1, sigma2, derive_seed(opt.seed, {93, static_cast<std::uint64_t>(r)}));
      bpv[r] = bipower_variation(incr.col(0), 1.0, 1.0, true);
    });
    const double mean = sample_mean(bpv);
    if (std::abs(mean - sigma2) > 0.05 * sigma2) ok = false;
    detail += "mean scaled BPV(1,1)=" + fmt(mean) + " (true 0.04); ";
  }

  {
    const double m2 = gaussian_abs_moment(2.0);
    if (std::abs(m2 - 1.0) > 1e-12) ok = false;
    detail += "m2-1=" + fmt(m2 - 1.0, 2);
  }

  report(7, ok, "estimator consistency at desk scale", detail);
}

// ---- criterion 8: noise-order regression -----------------------------------

void criterion_order(const Options& opt) {
  ExperimentConfig cfg;
  cfg.experiment = "order";
  cfg.reps = opt.reps_order;
  cfg.seed = opt.seed;
  cfg.threads = opt.threads;
  const OrderStudyResult res = run_order_study(cfg);

  bool ok = true;
  std::string detail;
  for (const auto& s : res.slopes) {
    const bool cell_ok = std::abs(s.slope_rv - (-s.q)) <= 0.15;
    detail += "q=" + fmt(s.q, 2) + ": slope=" + fmt(s.slope_rv, 3) + " (target " +
              fmt(-s.q, 2) + "+/-0.15); ";
    ok = ok && cell_ok;
  }
  report(8, ok, "RV noise-gap regression slopes", detail);
}

// ---- criterion 9: determinism ----------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism(const Options& opt) {
  ExperimentConfig cfg;
  cfg.experiment = "sizepower";
  cfg.cases = {"C1"};
  cfg.n_override = 4000;
  cfg.reps = 20;
  cfg.seed = opt.seed;

  cfg.threads = 1;
  cfg.out_dir = "acceptance_out/det_a";
  run_sizepower(cfg);
  cfg.threads = 2;
  cfg.out_dir = "acceptance_out/det_b";
  run_sizepower(cfg);

  const std::string a = slurp("acceptance_out/det_a/sizepower.csv");
  const std::string b = slurp("acceptance_out/det_b/sizepower.csv");
  const std::string am = slurp("acceptance_out/det_a/sizepower_meta.json");
  const std::string bm = slurp("acceptance_out/det_b/sizepower_meta.json");
  const bool ok = !a.empty() && a == b && am == bm;
  report(9, ok, "byte-identical outputs under config+seed re-runs",
         ok ? "csv and metadata identical across runs and thread counts"
            : "outputs differ");
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      opt.reps_full = 100;
      opt.reps_cons = 50;
      opt.reps_order = 30;
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      opt.seed = std::stoull(argv[++i]);
    } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      opt.threads = std::stoi(argv[++i]);
    }
  }

  std::cout << "acceptance suite: N=" << opt.reps_full << ", seed=" << opt.seed
            << "\n";
  criterion_rmse(opt);
  criteria_sizepower(opt);
  criterion_density(opt);
  criterion_identities(opt);
  criterion_consistency(opt);
  criterion_order(opt);
  criterion_determinism(opt);

  std::cout << (g_failures == 0
                    ? "all criteria passed"
                    : std::to_string(g_failures) + " criterion(s) failed")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
