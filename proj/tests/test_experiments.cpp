#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "smallnoise/experiments.hpp"
#include "smallnoise/io.hpp"

using namespace smallnoise;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("smallnoise_" + tag);
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("case registry") {
  CHECK(lookup_case("CJ1").n == 20000);
  CHECK(lookup_case("CJ2").n == 30000);
  CHECK(lookup_case("SJ1").jumps.kind == JumpKind::stable);
  CHECK(lookup_case("C1").d == 2);
  CHECK(lookup_case("D2").mode == BivariateMode::disjoint);
  CHECK(lookup_case("D2").n == 30000);
  CHECK(lookup_case("cont").jumps.kind == JumpKind::none);
  CHECK_THROWS_AS(lookup_case("XYZ"), std::invalid_argument);
  CHECK(bivariate_noise_grid().size() == 4);
  CHECK(univariate_noise_grid().size() == 3);
}

TEST_CASE("experiment outputs are byte-identical across runs and thread counts") {
  ExperimentConfig cfg;
  cfg.experiment = "rmse";
  cfg.cases = {"CJ1"};
  cfg.n_override = 2000;
  cfg.reps = 6;
  cfg.seed = 99;

  cfg.out_dir = temp_dir("det_a");
  cfg.threads = 1;
  run_rmse(cfg);
  const std::string a = slurp(cfg.out_dir + "/rmse.csv");

  cfg.out_dir = temp_dir("det_b");
  cfg.threads = 2;
  run_rmse(cfg);
  const std::string b = slurp(cfg.out_dir + "/rmse.csv");

  CHECK(a == b);
  CHECK(a.find("case,noise,zeta,n,reps") == 0);
}

TEST_CASE("size/power cells are proportions with binomial standard errors") {
  ExperimentConfig cfg;
  cfg.experiment = "sizepower";
  cfg.cases = {"C1"};
  cfg.n_override = 3000;
  cfg.reps = 24;
  cfg.seed = 5;
  const auto table = run_sizepower(cfg);
  REQUIRE(table.size() == 4);  // four noise levels
  for (const auto& cell : table) {
    CHECK(cell.rate_corrected >= 0.0);
    CHECK(cell.rate_corrected <= 1.0);
    const int valid = cell.reps - cell.degenerate;
    if (valid > 0) {
      const double se =
          std::sqrt(cell.rate_corrected * (1.0 - cell.rate_corrected) / valid);
      CHECK(cell.se_corrected == doctest::Approx(se).epsilon(1e-12));
    }
  }
}

TEST_CASE("density experiment emits standardized statistics and histograms") {
  ExperimentConfig cfg;
  cfg.experiment = "density";
  cfg.cases = {"cont"};
  cfg.n_override = 4000;
  cfg.reps = 40;
  cfg.seed = 12;
  cfg.out_dir = temp_dir("dens");
  const auto results = run_density(cfg);
  REQUIRE(results.size() == 1);
  CHECK(results[0].ks_corrected > 0.0);
  CHECK(results[0].ks_corrected < 0.5);
  CHECK(results[0].z_corrected.size() == 40);

  const std::string hist =
      slurp(cfg.out_dir + "/density_cont_hist_corrected.txt");
  CHECK(hist.find("bin_left,bin_right,count") == 0);
  int lines = 0;
  for (char ch : hist)
    if (ch == '\n') ++lines;
  CHECK(lines == 41);  // header + 40 bins
  CHECK(std::filesystem::exists(cfg.out_dir + "/density_summary.csv"));
}

TEST_CASE("order study slopes behave at the endpoints") {
  ExperimentConfig cfg;
  cfg.experiment = "order";
  cfg.reps = 30;
  cfg.seed = 21;
  const OrderStudyResult res = run_order_study(cfg);
  REQUIRE(res.slopes.size() == 2);
  CHECK(res.slopes[0].q == 0.0);
  CHECK(std::abs(res.slopes[0].slope_rv) < 0.15);  // flat gap at q = 0
  // the noise contribution decays no slower than the q = 0.5 rate bound
  CHECK(res.slopes[1].slope_rv < -0.35);
  for (const auto& p : res.points) {
    CHECK(std::isfinite(p.mean_abs_gap_rv));
    CHECK(p.mean_abs_gap_rv > 0.0);
  }
}

TEST_CASE("config files round-trip through the parser") {
  const std::string dir = temp_dir("cfg");
  std::filesystem::create_directories(dir);
  const std::string file = dir + "/exp.json";
  write_text_file(file, R"({
    "schema": "smallnoise-experiment/1",
    "experiment": "sizepower",
    "cases": ["C1", "D1"],
    "reps": 77,
    "seed": 4242,
    "level": 0.10,
    "estimator": {"p": 0.45, "alpha": 3.0, "theta": 0.40},
    "pairing": "printed",
    "denominator": "printed",
    "threads": 2
  })");
  const ExperimentConfig cfg = config_from_json_file(file);
  CHECK(cfg.experiment == "sizepower");
  CHECK(cfg.cases.size() == 2);
  CHECK(cfg.reps == 77);
  CHECK(cfg.seed == 4242);
  CHECK(cfg.level == 0.10);
  CHECK(cfg.estimator.siml.p == 0.45);
  CHECK(cfg.estimator.trunc.alpha == 3.0);
  CHECK(cfg.pairing == NoisePairing::printed);
  CHECK(cfg.denominator == DenominatorPower::printed);

  write_text_file(file, R"({"schema": "other/9"})");
  CHECK_THROWS_AS(config_from_json_file(file), std::runtime_error);
}

TEST_CASE("path dump format") {
  const SimCase sim = lookup_case("C1");
  SimCase small = sim;
  small.n = 50;
  const NoisySample s = simulate_case(small, 1e-2, 7, 0, 0, 0);
  const std::string dir = temp_dir("dump");
  std::filesystem::create_directories(dir);
  write_path_csv(s, dir + "/path.csv");
  write_truth_json(s.latent, dir + "/truth.json");

  const std::string csv = slurp(dir + "/path.csv");
  CHECK(csv.find("t,x1,x2,y1,y2") == 0);
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 52);  // header + n + 1 rows

  const std::string truth = slurp(dir + "/truth.json");
  CHECK(truth.find("\"s0\"") != std::string::npos);
}
