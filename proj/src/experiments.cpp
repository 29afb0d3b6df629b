#include "smallnoise/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "smallnoise/io.hpp"
#include "smallnoise/stats.hpp"
#include "smallnoise/variation.hpp"

namespace smallnoise {

namespace {

// Stream-derivation ids, one per experiment family.
enum : std::uint64_t {
  kExpRmse = 1,
  kExpSizePower = 2,
  kExpDensity = 3,
  kExpOrder = 4,
};

SvParams sv_first() { return {5.0, 0.2, -0.5, 0.2}; }
SvParams sv_second() { return {5.0, 0.15, -0.4, 0.15}; }

JumpSpec cp_jumps() { return JumpSpec::compound_poisson(10.0, 0.05, 0.30); }
JumpSpec bivariate_jumps() {
  // Idiosyncratic sizes N(0, 5^-2), common sizes N(0, 10^-2).
  return JumpSpec::cojump(5.0, 5.0, 10.0, 0.2, 0.2, 0.1, 0.1);
}

}  // namespace

SimCase lookup_case(const std::string& label) {
  SimCase c;
  c.label = label;
  c.sv1 = sv_first();
  if (label == "CJ1" || label == "CJ2") {
    c.n = label == "CJ1" ? 20000 : 30000;
    c.jumps = cp_jumps();
  } else if (label == "SJ1" || label == "SJ2") {
    c.n = label == "SJ1" ? 20000 : 30000;
    c.jumps = JumpSpec::stable(1.5, 1.0);
  } else if (label == "cont") {
    c.n = 20000;
    c.jumps = JumpSpec::none();
  } else if (label == "jump") {
    c.n = 20000;
    c.jumps = cp_jumps();
  } else if (label == "C1" || label == "C2" || label == "D1" || label == "D2") {
    c.d = 2;
    c.n = (label == "C1" || label == "D1") ? 20000 : 30000;
    c.sv2 = sv_second();
    c.jumps = bivariate_jumps();
    c.mode = (label[0] == 'C') ? BivariateMode::cojump : BivariateMode::disjoint;
  } else {
    throw std::invalid_argument("unknown case label: " + label);
  }
  return c;
}

const std::vector<std::string>& rmse_case_labels() {
  static const std::vector<std::string> labels = {"CJ1", "CJ2", "SJ1", "SJ2"};
  return labels;
}

const std::vector<std::string>& sizepower_case_labels() {
  static const std::vector<std::string> labels = {"C1", "C2", "D1", "D2"};
  return labels;
}

const std::vector<double>& univariate_noise_grid() {
  static const std::vector<double> grid = {0.0, 1e-4, 1e-2};
  return grid;
}

const std::vector<double>& bivariate_noise_grid() {
  static const std::vector<double> grid = {1e-4, 1e-2, 1e-1, 1.0};
  return grid;
}

std::string univariate_noise_label(int idx) {
  static const char* names[] = {"i", "ii", "iii"};
  return names[idx];
}

std::string bivariate_noise_label(int idx) {
  static const char* names[] = {"I", "II", "III", "IV"};
  return names[idx];
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("schema") ||
      j["schema"].get<std::string>().rfind("smallnoise-experiment/", 0) != 0)
    throw std::runtime_error("config " + path +
                             ": missing or unrecognized schema field");

  ExperimentConfig cfg;
  cfg.experiment = j.value("experiment", std::string{});
  if (j.contains("cases")) cfg.cases = j["cases"].get<std::vector<std::string>>();
  cfg.reps = j.value("reps", cfg.reps);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.level = j.value("level", cfg.level);
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.n_override = j.value("n", cfg.n_override);
  if (j.contains("estimator")) {
    const auto& e = j["estimator"];
    cfg.estimator.siml.p = e.value("p", cfg.estimator.siml.p);
    cfg.estimator.trunc.alpha = e.value("alpha", cfg.estimator.trunc.alpha);
    cfg.estimator.trunc.theta = e.value("theta", cfg.estimator.trunc.theta);
    cfg.estimator.window.c = e.value("window_c", cfg.estimator.window.c);
    cfg.estimator.window.gamma = e.value("window_gamma", cfg.estimator.window.gamma);
  }
  if (j.contains("pairing"))
    cfg.pairing = j["pairing"] == "printed" ? NoisePairing::printed
                                            : NoisePairing::theorem1;
  if (j.contains("denominator"))
    cfg.denominator = j["denominator"] == "printed" ? DenominatorPower::printed
                                                    : DenominatorPower::squared;
  if (j.contains("ingredients"))
    cfg.ingredients = j["ingredients"] == "plain" ? IngredientSet::plain
                                                  : IngredientSet::cojump_truncated;
  cfg.estimator.siml.validate();
  cfg.estimator.trunc.validate();
  return cfg;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

NoisySample simulate_case(const SimCase& sim, double zeta, std::uint64_t master,
                          std::uint64_t experiment_id, std::uint64_t cell_id,
                          std::uint64_t rep) {
  const std::uint64_t sim_seed =
      derive_seed(master, {experiment_id, cell_id, rep, 11});
  const std::uint64_t noise_seed =
      derive_seed(master, {experiment_id, cell_id, rep, 13});
  const Grid grid(sim.n);
  LatentPath latent =
      sim.d == 1
          ? simulate_univariate(sim.sv1, sim.jumps, grid, sim_seed)
          : simulate_bivariate_cojump(sim.sv1, sim.sv2, sim.jumps, grid, sim_seed,
                                      sim.mode);
  const NoiseSpec noise =
      sim.d == 1 ? NoiseSpec(zeta) : NoiseSpec::bivariate(zeta, zeta);
  return add_noise(latent, noise, noise_seed);
}

CojumpAnalysis analyze_cojump_sample(const NoisySample& sample, double level,
                                     const EstimatorConfig& cfg, NoisePairing pairing,
                                     DenominatorPower denom, IngredientSet ingredients,
                                     const SimlBasis* basis) {
  CojumpVariancePair vars = cojump_avar_pair(sample, cfg.siml, cfg.window, cfg.trunc,
                                             pairing, denom, ingredients, basis);
  CojumpAnalysis out;
  const double s122 = s_krs(sample, 1, 2, 2);
  const double s222 = s_krs(sample, 2, 2, 2);
  if (std::abs(s122) < 1e-12)
    throw DegenerateStatistic("analyze_cojump_sample: S_{1,2,2} ~ 0");
  const double t = s222 / s122;
  const double crit = normal_quantile(1.0 - level / 2.0);

  auto fill = [&](TestReport& rep, const AvarReport& var, TestVariant variant) {
    rep.t = t;
    rep.s122 = s122;
    rep.s222 = s222;
    rep.variance = var;
    rep.level = level;
    rep.critical = crit;
    rep.variant = variant;
    rep.n = sample.n();
    rep.seed = sample.seed;
    if (var.no_mass) {
      rep.no_cojump_mass = true;
      rep.z = std::numeric_limits<double>::infinity();
      rep.reject = true;
      return;
    }
    if (!(var.value > 0.0))
      throw DegenerateStatistic("analyze_cojump_sample: degenerate variance");
    rep.z = (t - 1.0) / std::sqrt(var.value);
    rep.reject = std::abs(rep.z) >= crit;
  };
  fill(out.corrected, vars.corrected, TestVariant::corrected);
  fill(out.jt, vars.jt, TestVariant::jt);
  return out;
}

namespace {

void ensure_out_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

void write_meta(const ExperimentConfig& cfg, const std::string& name,
                nlohmann::json extra = {}) {
  if (cfg.out_dir.empty()) return;
  nlohmann::json j;
  j["schema"] = "smallnoise-experiment/1";
  j["experiment"] = cfg.experiment.empty() ? name : cfg.experiment;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["level"] = cfg.level;
  j["estimator"] = {{"p", cfg.estimator.siml.p},
                    {"alpha", cfg.estimator.trunc.alpha},
                    {"theta", cfg.estimator.trunc.theta},
                    {"window_c", cfg.estimator.window.c},
                    {"window_gamma", cfg.estimator.window.gamma}};
  j["pairing"] = cfg.pairing == NoisePairing::theorem1 ? "theorem1" : "printed";
  j["denominator"] =
      cfg.denominator == DenominatorPower::squared ? "squared" : "printed";
  j["ingredients"] =
      cfg.ingredients == IngredientSet::plain ? "plain" : "truncated";
  // density statistics are centred at the simulator-known true U0 and scaled
  // by the estimated variance
  j["density_centering"] = "true-U0, estimated variance";
  if (!extra.is_null() && !extra.empty()) j["extra"] = extra;
  write_text_file(cfg.out_dir + "/" + name + "_meta.json", j.dump(2) + "\n");
}

// One shared basis per (n, m); built before the parallel section.
class BasisCache {
 public:
  const SimlBasis* get(int n, int m) {
    const auto key = std::make_pair(n, m);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, std::make_unique<SimlBasis>(n, m)).first;
    return it->second.get();
  }

 private:
  std::map<std::pair<int, int>, std::unique_ptr<SimlBasis>> cache_;
};

double rmse_of(const std::vector<double>& errors) {
  CompensatedSum acc;
  for (double e : errors) acc.add(e * e);
  return std::sqrt(acc.value() / static_cast<double>(errors.size()));
}

}  // namespace

std::vector<RmseCell> run_rmse(const ExperimentConfig& cfg) {
  const std::vector<std::string> labels =
      cfg.cases.empty() ? rmse_case_labels() : cfg.cases;
  ensure_out_dir(cfg.out_dir);

  BasisCache bases;
  std::vector<RmseCell> table;
  std::uint64_t cell_id = 0;
  for (const auto& label : labels) {
    SimCase sim = lookup_case(label);
    if (sim.d != 1)
      throw std::invalid_argument("run_rmse: univariate case required: " + label);
    if (cfg.n_override > 0) sim.n = cfg.n_override;
    for (int zi = 0; zi < static_cast<int>(univariate_noise_grid().size()); ++zi) {
      const double zeta = univariate_noise_grid()[zi];
      const SimlBasis* basis = bases.get(sim.n, cfg.estimator.siml.m(sim.n));

      std::vector<double> err_ivhat(cfg.reps), err_rv(cfg.reps),
          err_oracle(cfg.reps), zeta_hats(cfg.reps);
      const std::uint64_t this_cell = cell_id;
      parallel_for(cfg.reps, cfg.threads, [&, this_cell](int rep) {
        const NoisySample sample =
            simulate_case(sim, zeta, cfg.seed, kExpRmse, this_cell, rep);
        const IvEstimate est = integrated_volatility(sample, cfg.estimator.siml,
                                                     cfg.estimator.trunc, basis);
        const double true_iv = sample.latent.truth.iv(0, 0);
        const double rv = est.siml.rv(0);
        const double trvj = est.siml.qv(0, 0) - est.diag(0);
        const double trvc = rv - trvj;
        err_ivhat[rep] = est.diag(0) - true_iv;
        err_rv[rep] = rv - true_iv;
        err_oracle[rep] = trvc - 2.0 * zeta - true_iv;
        zeta_hats[rep] = est.siml.zeta_hat(0);
      });

      RmseCell cell;
      cell.label = label;
      cell.noise = univariate_noise_label(zi);
      cell.zeta = zeta;
      cell.n = sim.n;
      cell.reps = cfg.reps;
      cell.rmse_ivhat = rmse_of(err_ivhat);
      cell.rmse_rv = rmse_of(err_rv);
      cell.rmse_oracle = rmse_of(err_oracle);
      cell.bias_ivhat = sample_mean(err_ivhat);
      cell.mean_zeta_hat = sample_mean(zeta_hats);
      table.push_back(cell);
      ++cell_id;
    }
  }

  if (!cfg.out_dir.empty()) {
    std::ostringstream out;
    out << "case,noise,zeta,n,reps,rmse_ivhat_x1e3,rmse_rv_x1e3,rmse_oracle_x1e3,"
           "bias_ivhat_x1e3,mean_zeta_hat\n";
    for (const auto& c : table) {
      out << c.label << ',' << c.noise << ',' << format_real(c.zeta) << ',' << c.n
          << ',' << c.reps << ',' << format_real(c.rmse_ivhat * 1e3) << ','
          << format_real(c.rmse_rv * 1e3) << ',' << format_real(c.rmse_oracle * 1e3)
          << ',' << format_real(c.bias_ivhat * 1e3) << ','
          << format_real(c.mean_zeta_hat) << '\n';
    }
    write_text_file(cfg.out_dir + "/rmse.csv", out.str());
    write_meta(cfg, "rmse");
  }
  return table;
}

std::vector<SizePowerCell> run_sizepower(const ExperimentConfig& cfg) {
  const std::vector<std::string> labels =
      cfg.cases.empty() ? sizepower_case_labels() : cfg.cases;
  ensure_out_dir(cfg.out_dir);

  BasisCache bases;
  std::vector<SizePowerCell> table;
  std::uint64_t cell_id = 0;
  for (const auto& label : labels) {
    SimCase sim = lookup_case(label);
    if (sim.d != 2)
      throw std::invalid_argument("run_sizepower: bivariate case required: " + label);
    if (cfg.n_override > 0) sim.n = cfg.n_override;
    for (int zi = 0; zi < static_cast<int>(bivariate_noise_grid().size()); ++zi) {
      const double zeta = bivariate_noise_grid()[zi];
      const SimlBasis* basis = bases.get(sim.n, cfg.estimator.siml.m(sim.n));

      // -1 marks a replication where the test was not applicable
      std::vector<int> rej_corrected(cfg.reps, -1), rej_jt(cfg.reps, -1);
      const std::uint64_t this_cell = cell_id;
      parallel_for(cfg.reps, cfg.threads, [&, this_cell](int rep) {
        const NoisySample sample =
            simulate_case(sim, zeta, cfg.seed, kExpSizePower, this_cell, rep);
        try {
          const CojumpAnalysis an =
              analyze_cojump_sample(sample, cfg.level, cfg.estimator, cfg.pairing,
                                    cfg.denominator, cfg.ingredients, basis);
          rej_corrected[rep] = an.corrected.reject ? 1 : 0;
          rej_jt[rep] = an.jt.reject ? 1 : 0;
        } catch (const DegenerateStatistic&) {
          // leave marked not-applicable
        }
      });

      SizePowerCell cell;
      cell.label = label;
      cell.noise = bivariate_noise_label(zi);
      cell.zeta = zeta;
      cell.n = sim.n;
      cell.reps = cfg.reps;
      int valid = 0, hits_c = 0, hits_jt = 0;
      for (int r = 0; r < cfg.reps; ++r) {
        if (rej_corrected[r] < 0) {
          ++cell.degenerate;
          continue;
        }
        ++valid;
        hits_c += rej_corrected[r];
        hits_jt += rej_jt[r];
      }
      if (valid > 0) {
        cell.rate_corrected = static_cast<double>(hits_c) / valid;
        cell.rate_jt = static_cast<double>(hits_jt) / valid;
        cell.se_corrected =
            std::sqrt(cell.rate_corrected * (1.0 - cell.rate_corrected) / valid);
        cell.se_jt = std::sqrt(cell.rate_jt * (1.0 - cell.rate_jt) / valid);
      }
      table.push_back(cell);
      ++cell_id;
    }
  }

  if (!cfg.out_dir.empty()) {
    std::ostringstream out;
    out << "case,noise,zeta,n,reps,rate_corrected,se_corrected,rate_jt,se_jt,"
           "degenerate\n";
    for (const auto& c : table) {
      out << c.label << ',' << c.noise << ',' << format_real(c.zeta) << ',' << c.n
          << ',' << c.reps << ',' << format_real(c.rate_corrected) << ','
          << format_real(c.se_corrected) << ',' << format_real(c.rate_jt) << ','
          << format_real(c.se_jt) << ',' << c.degenerate << '\n';
    }
    write_text_file(cfg.out_dir + "/sizepower.csv", out.str());
    write_meta(cfg, "sizepower");
  }
  return table;
}

namespace {

void write_histogram(const std::string& path, const std::vector<double>& z,
                     int bins = 40, double lo = -5.0, double hi = 5.0) {
  std::vector<int> counts(bins, 0);
  const double width = (hi - lo) / bins;
  for (double v : z) {
    if (v < lo || v >= hi) continue;
    ++counts[static_cast<int>((v - lo) / width)];
  }
  std::ostringstream out;
  out << "bin_left,bin_right,count\n";
  for (int b = 0; b < bins; ++b)
    out << format_real(lo + b * width) << ',' << format_real(lo + (b + 1) * width)
        << ',' << counts[b] << '\n';
  write_text_file(path, out.str());
}

}  // namespace

std::vector<DensityResult> run_density(const ExperimentConfig& cfg) {
  std::vector<std::string> kinds = cfg.cases;
  if (kinds.empty()) kinds = {"cont", "jump", "cojump"};
  ensure_out_dir(cfg.out_dir);

  BasisCache bases;
  std::vector<DensityResult> results;
  std::uint64_t cell_id = 0;
  for (const auto& kind : kinds) {
    DensityResult res;
    res.kind = kind;
    res.reps = cfg.reps;
    res.z_corrected.resize(cfg.reps);
    res.z_uncorrected.resize(cfg.reps);

    if (kind == "cojump") {
      SimCase sim = lookup_case("C1");
      if (cfg.n_override > 0) sim.n = cfg.n_override;
      res.n = sim.n;
      res.zeta = 1.0;  // level IV
      const SimlBasis* basis = bases.get(sim.n, cfg.estimator.siml.m(sim.n));
      const std::uint64_t this_cell = cell_id;
      parallel_for(cfg.reps, cfg.threads, [&, this_cell](int rep) {
        const NoisySample sample =
            simulate_case(sim, res.zeta, cfg.seed, kExpDensity, this_cell, rep);
        const CojumpAnalysis an =
            analyze_cojump_sample(sample, cfg.level, cfg.estimator, cfg.pairing,
                                  cfg.denominator, cfg.ingredients, basis);
        res.z_corrected[rep] = an.corrected.z;
        res.z_uncorrected[rep] = an.jt.z;
      });
    } else {
      SimCase sim = lookup_case(kind);  // cont | jump
      if (cfg.n_override > 0) sim.n = cfg.n_override;
      res.n = sim.n;
      res.zeta = 1e-2;  // level (iii)
      const RvAvarMode mode =
          kind == "cont" ? RvAvarMode::continuous : RvAvarMode::jump;
      const SimlBasis* basis = bases.get(sim.n, cfg.estimator.siml.m(sim.n));
      const std::uint64_t this_cell = cell_id;
      parallel_for(cfg.reps, cfg.threads, [&, this_cell](int rep) {
        const NoisySample sample =
            simulate_case(sim, res.zeta, cfg.seed, kExpDensity, this_cell, rep);
        const RvAnalysis an = analyze_rv_sample(sample, mode, cfg.estimator.siml,
                                                cfg.estimator.window,
                                                cfg.estimator.trunc, basis);
        const PathTruth& truth = sample.latent.truth;
        const double rv = an.siml.rv(0);
        const double jump_part =
            mode == RvAvarMode::jump ? truth.jump_qv(0, 0) : 0.0;
        const double u0 = truth.iv(0, 0) + jump_part + 2.0 * res.zeta;
        const double u0_nonoise = truth.iv(0, 0) + jump_part;
        res.z_corrected[rep] = (rv - u0) / std::sqrt(an.corrected.value);
        res.z_uncorrected[rep] = (rv - u0_nonoise) / std::sqrt(an.uncorrected.value);
      });
    }

    res.ks_corrected = ks_distance_normal(res.z_corrected);
    res.ks_uncorrected = ks_distance_normal(res.z_uncorrected);

    if (!cfg.out_dir.empty()) {
      std::ostringstream stats;
      stats << "rep,z_corrected,z_uncorrected\n";
      for (int r = 0; r < cfg.reps; ++r)
        stats << r << ',' << format_real(res.z_corrected[r]) << ','
              << format_real(res.z_uncorrected[r]) << '\n';
      write_text_file(cfg.out_dir + "/density_" + kind + "_stats.csv", stats.str());
      write_histogram(cfg.out_dir + "/density_" + kind + "_hist_corrected.txt",
                      res.z_corrected);
      write_histogram(cfg.out_dir + "/density_" + kind + "_hist_uncorrected.txt",
                      res.z_uncorrected);
    }
    results.push_back(std::move(res));
    ++cell_id;
  }

  if (!cfg.out_dir.empty()) {
    std::ostringstream out;
    out << "kind,n,reps,zeta,ks_corrected,ks_uncorrected\n";
    for (const auto& r : results)
      out << r.kind << ',' << r.n << ',' << r.reps << ',' << format_real(r.zeta)
          << ',' << format_real(r.ks_corrected) << ','
          << format_real(r.ks_uncorrected) << '\n';
    write_text_file(cfg.out_dir + "/density_summary.csv", out.str());
    write_meta(cfg, "density");
  }
  return results;
}

OrderStudyResult run_order_study(const ExperimentConfig& cfg) {
  std::vector<double> qs;
  if (cfg.cases.empty()) {
    qs = {0.0, 0.5};
  } else {
    for (const auto& s : cfg.cases) qs.push_back(std::stod(s));
  }
  const int draws = cfg.reps;
  const double zeta = 1e-2;
  const int ladder_lo = 10, ladder_hi = 16;
  const int n_fine = 1 << ladder_hi;
  ensure_out_dir(cfg.out_dir);

  // One latent path at the finest grid, nested-subsampled down the ladder.
  const Grid fine(n_fine);
  const LatentPath latent = simulate_univariate(
      sv_first(), JumpSpec::none(), fine, derive_seed(cfg.seed, {kExpOrder, 0}));

  OrderStudyResult out;
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    const double q = qs[qi];
    std::vector<double> log_n, log_rv, log_bpv;
    for (int expo = ladder_lo; expo <= ladder_hi; ++expo) {
      const int n = 1 << expo;
      const int step = n_fine / n;
      Eigen::ArrayXd x(n + 1);
      for (int i = 0; i <= n; ++i) x(i) = latent.x(i * step, 0);
      const Eigen::ArrayXd dx = x.tail(n) - x.head(n);
      const double rv_x = power_variation(dx, 2.0);
      const double bpv_x = bipower_variation(dx, 1.0, 1.0);
      const double eps =
          std::sqrt(zeta) * std::pow(static_cast<double>(n), -(1.0 + 2.0 * q) / 2.0);

      std::vector<double> gap_rv(draws), gap_bpv(draws);
      parallel_for(draws, cfg.threads, [&](int j) {
        Xoshiro256pp rng(derive_seed(
            cfg.seed, {kExpOrder, qi + 1, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(j)}));
        NormalSampler normal;
        Eigen::ArrayXd y(n + 1);
        for (int i = 0; i <= n; ++i) y(i) = x(i) + eps * normal(rng);
        const Eigen::ArrayXd dy = y.tail(n) - y.head(n);
        gap_rv[j] = std::abs(power_variation(dy, 2.0) - rv_x);
        gap_bpv[j] = std::abs(bipower_variation(dy, 1.0, 1.0) - bpv_x);
      });

      OrderStudyResult::Point pt;
      pt.q = q;
      pt.n = n;
      pt.mean_abs_gap_rv = sample_mean(gap_rv);
      pt.mean_abs_gap_bpv = sample_mean(gap_bpv);
      out.points.push_back(pt);
      log_n.push_back(std::log(static_cast<double>(n)));
      log_rv.push_back(std::log(pt.mean_abs_gap_rv));
      log_bpv.push_back(std::log(pt.mean_abs_gap_bpv));
    }
    OrderStudyResult::Slope slope;
    slope.q = q;
    slope.slope_rv = regression_slope(log_n, log_rv);
    slope.slope_bpv = regression_slope(log_n, log_bpv);
    out.slopes.push_back(slope);
  }

  if (!cfg.out_dir.empty()) {
    std::ostringstream pts;
    pts << "q,n,mean_abs_gap_rv,mean_abs_gap_bpv\n";
    for (const auto& p : out.points)
      pts << format_real(p.q) << ',' << p.n << ',' << format_real(p.mean_abs_gap_rv)
          << ',' << format_real(p.mean_abs_gap_bpv) << '\n';
    write_text_file(cfg.out_dir + "/order_points.csv", pts.str());

    std::ostringstream sl;
    sl << "q,slope_rv,slope_bpv\n";
    for (const auto& s : out.slopes)
      sl << format_real(s.q) << ',' << format_real(s.slope_rv) << ','
         << format_real(s.slope_bpv) << '\n';
    write_text_file(cfg.out_dir + "/order_slopes.csv", sl.str());
    write_meta(cfg, "order");
  }
  return out;
}

}  // namespace smallnoise
