#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "smallnoise/experiments.hpp"
#include "smallnoise/io.hpp"

using namespace smallnoise;

namespace {

struct CommonOpts {
  std::string config_file;
  std::uint64_t seed = 20250810;
  int n = 0;
  int reps = 1000;
  std::string out_dir;
  bool quick = false;
  int threads = 0;
  std::string variant = "corrected";
  std::string pairing = "theorem1";
  std::string denominator = "squared";
  std::string ingredients = "truncated";
  double level = 0.05;
  std::string case_label;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_file, "JSON config file (flags override it)");
  cmd->add_option("--seed", o.seed, "master 64-bit seed");
  cmd->add_option("--n", o.n, "grid size override");
  cmd->add_option("--reps", o.reps, "Monte Carlo replications");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_flag("--quick", o.quick, "reduced replication count (N=100)");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--variant", o.variant, "test variant: corrected | jt")
      ->check(CLI::IsMember({"corrected", "jt"}));
  cmd->add_option("--pairing", o.pairing, "noise-term pairing: theorem1 | printed")
      ->check(CLI::IsMember({"theorem1", "printed"}));
  cmd->add_option("--denominator", o.denominator,
                  "variance denominator: squared | printed")
      ->check(CLI::IsMember({"squared", "printed"}));
  cmd->add_option("--ingredients", o.ingredients,
                  "jump-functional ingredient sums: truncated | plain")
      ->check(CLI::IsMember({"truncated", "plain"}));
  cmd->add_option("--level", o.level, "test level");
  cmd->add_option("--case", o.case_label, "case label from the registry");
}

ExperimentConfig make_config(const CommonOpts& o, const std::string& experiment) {
  ExperimentConfig cfg;
  if (!o.config_file.empty()) cfg = config_from_json_file(o.config_file);
  cfg.experiment = experiment;
  cfg.seed = o.seed;
  cfg.reps = o.quick ? 100 : o.reps;
  cfg.out_dir = o.out_dir;
  cfg.threads = o.threads;
  cfg.level = o.level;
  cfg.n_override = o.n;
  if (!o.case_label.empty()) cfg.cases = {o.case_label};
  cfg.pairing =
      o.pairing == "printed" ? NoisePairing::printed : NoisePairing::theorem1;
  cfg.denominator = o.denominator == "printed" ? DenominatorPower::printed
                                               : DenominatorPower::squared;
  cfg.ingredients = o.ingredients == "plain" ? IngredientSet::plain
                                             : IngredientSet::cojump_truncated;
  return cfg;
}

NoisySample make_sample(const CommonOpts& o, double zeta, int default_d) {
  std::string label = o.case_label;
  if (label.empty()) label = default_d == 2 ? "C1" : "jump";
  SimCase sim = lookup_case(label);
  if (o.n > 0) sim.n = o.n;
  return simulate_case(sim, zeta, o.seed, 0, 0, 0);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ito-semimartingale simulation, noise-robust volatility "
               "estimation, and co-jump testing"};
  app.require_subcommand(1);

  CommonOpts o;
  double zeta = 1e-2;

  auto* sim = app.add_subcommand("simulate", "simulate one path, dump CSV + truth");
  add_common(sim, o);
  sim->add_option("--zeta", zeta, "noise level zeta");

  auto* est = app.add_subcommand("estimate", "run the estimator stack on one path");
  add_common(est, o);
  est->add_option("--zeta", zeta, "noise level zeta");

  auto* tst = app.add_subcommand("test", "run the co-jump test on one path");
  add_common(tst, o);
  tst->add_option("--zeta", zeta, "noise level zeta");

  auto* rmse = app.add_subcommand("exp-rmse", "integrated-volatility RMSE table");
  add_common(rmse, o);
  auto* sp = app.add_subcommand("exp-sizepower", "co-jump test size/power table");
  add_common(sp, o);
  auto* dens = app.add_subcommand("exp-density", "standardized-statistic densities");
  add_common(dens, o);
  auto* ord = app.add_subcommand("exp-order", "noise-order regression study");
  add_common(ord, o);

  CLI11_PARSE(app, argc, argv);

  try {
    Timer timer;
    if (sim->parsed()) {
      const NoisySample sample = make_sample(o, zeta, 1);
      const std::string dir = o.out_dir.empty() ? "." : o.out_dir;
      std::filesystem::create_directories(dir);
      write_path_csv(sample, dir + "/path.csv");
      write_truth_json(sample.latent, dir + "/truth.json");
      std::cout << "wrote " << dir << "/path.csv and truth.json (n = " << sample.n()
                << ", d = " << sample.d() << ")\n";
    } else if (est->parsed()) {
      const NoisySample sample = make_sample(o, zeta, 1);
      EstimatorConfig ecfg;
      const IvEstimate iv =
          integrated_volatility(sample, ecfg.siml, ecfg.trunc);
      nlohmann::json j;
      j["n"] = sample.n();
      j["d"] = sample.d();
      j["m"] = iv.siml.m;
      j["qv"] = std::vector<double>{iv.siml.qv(0, 0)};
      j["rv"] = std::vector<double>{iv.siml.rv(0)};
      j["zeta_hat"] = std::vector<double>{iv.siml.zeta_hat(0)};
      j["iv_hat"] = std::vector<double>{iv.diag(0)};
      if (sample.d() == 2) {
        j["qv"] = std::vector<double>{iv.siml.qv(0, 0), iv.siml.qv(1, 1)};
        j["qv_cross"] = iv.siml.qv(0, 1);
        j["rv"] = std::vector<double>{iv.siml.rv(0), iv.siml.rv(1)};
        j["zeta_hat"] =
            std::vector<double>{iv.siml.zeta_hat(0), iv.siml.zeta_hat(1)};
        j["iv_hat"] = std::vector<double>{iv.diag(0), iv.diag(1)};
        j["iv_hat_cross"] = iv.cross;
      }
      j["truth_iv"] = sample.latent.truth.iv(0, 0);
      std::cout << j.dump(2) << '\n';
    } else if (tst->parsed()) {
      const NoisySample sample = make_sample(o, zeta, 2);
      EstimatorConfig ecfg;
      const TestVariant variant =
          o.variant == "jt" ? TestVariant::jt : TestVariant::corrected;
      const NoisePairing pairing =
          o.pairing == "printed" ? NoisePairing::printed : NoisePairing::theorem1;
      const DenominatorPower denom = o.denominator == "printed"
                                         ? DenominatorPower::printed
                                         : DenominatorPower::squared;
      const IngredientSet ing = o.ingredients == "plain"
                                    ? IngredientSet::plain
                                    : IngredientSet::cojump_truncated;
      const TestReport rep =
          cojump_test(sample, o.level, variant, ecfg, pairing, denom, ing);
      std::cout << report_to_json(rep).dump(2) << '\n';
    } else if (rmse->parsed()) {
      const auto table = run_rmse(make_config(o, "rmse"));
      for (const auto& c : table)
        std::cout << c.label << '-' << c.noise << ":  rmse(IVhat) = "
                  << c.rmse_ivhat * 1e3 << "e-3   rmse(RV) = " << c.rmse_rv * 1e3
                  << "e-3   rmse(TRVC-2zeta) = " << c.rmse_oracle * 1e3 << "e-3\n";
      std::cout << "elapsed " << timer.seconds() << " s\n";
    } else if (sp->parsed()) {
      const auto table = run_sizepower(make_config(o, "sizepower"));
      for (const auto& c : table)
        std::cout << c.label << '-' << c.noise
                  << ":  corrected = " << c.rate_corrected << " (se "
                  << c.se_corrected << ")   jt = " << c.rate_jt << " (se "
                  << c.se_jt << ")\n";
      std::cout << "elapsed " << timer.seconds() << " s\n";
    } else if (dens->parsed()) {
      const auto results = run_density(make_config(o, "density"));
      for (const auto& r : results)
        std::cout << r.kind << ":  KS corrected = " << r.ks_corrected
                  << "   KS uncorrected = " << r.ks_uncorrected << '\n';
      std::cout << "elapsed " << timer.seconds() << " s\n";
    } else if (ord->parsed()) {
      const auto res = run_order_study(make_config(o, "order"));
      for (const auto& s : res.slopes)
        std::cout << "q = " << s.q << ":  slope(RV gap) = " << s.slope_rv
                  << "   slope(BPV gap) = " << s.slope_bpv << '\n';
      std::cout << "elapsed " << timer.seconds() << " s\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
