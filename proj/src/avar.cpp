#include "smallnoise/avar.hpp"

#include <cmath>
#include <sstream>

#include "smallnoise/stats.hpp"
#include "smallnoise/variation.hpp"

namespace smallnoise {

namespace {

Eigen::ArrayXd increment_norms(const Eigen::Ref<const Eigen::ArrayXXd>& incr) {
  if (incr.cols() == 1) return incr.col(0).abs();
  return incr.matrix().rowwise().norm().array();
}

void check_component(const Eigen::Ref<const Eigen::ArrayXXd>& incr, int comp) {
  if (comp < 0 || comp >= incr.cols())
    throw std::invalid_argument("component index out of range");
}

// Applies the diagonal noise correction and floor to a raw window-mean path.
Eigen::ArrayXd corrected_spot(const Eigen::ArrayXd& raw, double correction,
                              bool diagonal) {
  if (correction == 0.0 && !diagonal) return raw;
  Eigen::ArrayXd c = raw - correction;
  if (diagonal) c = c.max(0.0);
  return c;
}

}  // namespace

Eigen::ArrayXd spot_cov_path(const Eigen::Ref<const Eigen::ArrayXXd>& increments,
                             int comp_l, int comp_m, const WindowRule& window,
                             const TruncationRule& trunc, double noise_correction) {
  check_component(increments, comp_l);
  check_component(increments, comp_m);
  const int n = static_cast<int>(increments.rows());
  const double delta = 1.0 / static_cast<double>(n);
  const int kn = window.k(n);
  const double thr = trunc.threshold(n);
  const bool diagonal = comp_l == comp_m;

  const Eigen::ArrayXd norms = increment_norms(increments);
  Eigen::ArrayXd w(n);
  for (int j = 0; j < n; ++j)
    w(j) = norms(j) <= thr ? increments(j, comp_l) * increments(j, comp_m) : 0.0;

  // prefix sums in long double; the windowed differences stay well scaled
  std::vector<long double> pre(static_cast<std::size_t>(n) + 1, 0.0L);
  for (int j = 0; j < n; ++j) pre[j + 1] = pre[j] + static_cast<long double>(w(j));

  Eigen::ArrayXd c(n);
  for (int i = 1; i <= n; ++i) {
    const int lo = std::max(1, i - kn), hi = std::min(n, i + kn);
    const int count = hi - lo;  // window minus the centre cell
    const long double s = pre[hi] - pre[lo - 1] - static_cast<long double>(w(i - 1));
    double ci = static_cast<double>(s) / (static_cast<double>(count) * delta) -
                noise_correction;
    if (diagonal && ci < 0.0) ci = 0.0;
    c(i - 1) = ci;
  }
  return c;
}

double spot_vol(const NoisySample& sample, int cell, int comp_l, int comp_m,
                const WindowRule& window, const TruncationRule& trunc,
                const Eigen::VectorXd& zeta_hat) {
  const int n = sample.n();
  if (cell < 1 || cell > n) throw std::invalid_argument("spot_vol: cell out of range");
  const Eigen::ArrayXXd incr = sample.increments();
  const double corr = comp_l == comp_m
                          ? 2.0 * std::sqrt(zeta_hat(comp_l) * zeta_hat(comp_m))
                          : 0.0;
  return spot_cov_path(incr, comp_l, comp_m, window, trunc, corr)(cell - 1);
}

namespace {

double a_hat_from_path(const Eigen::ArrayXd& spot, int n, int kn, int r) {
  CompensatedSum acc;
  const int last = n - kn + 1;
  for (int i = 1; i <= last; ++i) acc.add(std::pow(spot(i - 1), r));
  return acc.value() / static_cast<double>(n);
}

}  // namespace

double a_hat(const NoisySample& sample, int comp_l, int comp_m, int r,
             const WindowRule& window, const TruncationRule& trunc,
             const Eigen::VectorXd& zeta_hat) {
  if (r < 1) throw std::invalid_argument("a_hat: r >= 1 required");
  const int n = sample.n();
  const Eigen::ArrayXXd incr = sample.increments();
  const double corr = comp_l == comp_m
                          ? 2.0 * std::sqrt(zeta_hat(comp_l) * zeta_hat(comp_m))
                          : 0.0;
  const Eigen::ArrayXd c = spot_cov_path(incr, comp_l, comp_m, window, trunc, corr);
  return a_hat_from_path(c, n, window.k(n), r);
}

double weighted_power_sum(const Eigen::Ref<const Eigen::ArrayXXd>& increments,
                          int comp_l, int comp_m, int r, int s,
                          const Eigen::ArrayXd& weights) {
  check_component(increments, comp_l);
  check_component(increments, comp_m);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < increments.rows(); ++i) {
    const double lead =
        std::pow(increments(i, comp_l), r) * std::pow(increments(i, comp_m), s);
    acc.add(lead * weights(i));
  }
  return acc.value();
}

double power_sum(const Eigen::Ref<const Eigen::ArrayXXd>& increments, int comp_l,
                 int comp_m, int r, int s) {
  check_component(increments, comp_l);
  check_component(increments, comp_m);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < increments.rows(); ++i)
    acc.add(std::pow(increments(i, comp_l), r) * std::pow(increments(i, comp_m), s));
  return acc.value();
}

double d_hat(const NoisySample& sample, int comp_l, int comp_m, int comp_p,
             int comp_q, int r, int s, const WindowRule& window,
             const TruncationRule& trunc, const Eigen::VectorXd& zeta_hat) {
  if (r < 2 || s < 2)
    throw std::invalid_argument("d_hat: r, s >= 2 required (use d_hat_11 for (1,1))");
  const Eigen::ArrayXXd incr = sample.increments();
  const double corr = comp_p == comp_q
                          ? 2.0 * std::sqrt(zeta_hat(comp_p) * zeta_hat(comp_q))
                          : 0.0;
  const Eigen::ArrayXd spot = spot_cov_path(incr, comp_p, comp_q, window, trunc, corr);
  return weighted_power_sum(incr, comp_l, comp_m, r, s, spot);
}

namespace {

double d11_from_path(const Eigen::Ref<const Eigen::ArrayXXd>& incr,
                     const Eigen::ArrayXd& spot, int comp_l, int comp_m,
                     double thr) {
  const Eigen::ArrayXd norms = increment_norms(incr);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < incr.rows(); ++i)
    if (norms(i) > thr) acc.add(spot(i) * incr(i, comp_l) * incr(i, comp_m));
  return acc.value();
}

}  // namespace

double d_hat_11(const NoisySample& sample, int comp_l, int comp_m, int comp_p,
                int comp_q, const WindowRule& window, const TruncationRule& trunc,
                const Eigen::VectorXd& zeta_hat) {
  const Eigen::ArrayXXd incr = sample.increments();
  const double corr = comp_p == comp_q
                          ? 2.0 * std::sqrt(zeta_hat(comp_p) * zeta_hat(comp_q))
                          : 0.0;
  const Eigen::ArrayXd spot = spot_cov_path(incr, comp_p, comp_q, window, trunc, corr);
  return d11_from_path(incr, spot, comp_l, comp_m,
                       trunc.threshold(sample.n()));
}

double j_hat(const NoisySample& sample, int comp_l, int comp_m, int r, int s) {
  if (r < 2 || s < 2) throw std::invalid_argument("j_hat: r, s >= 2 required");
  const Eigen::ArrayXXd incr = sample.increments();
  return power_sum(incr, comp_l, comp_m, r, s);
}

double f_hat(const NoisySample& sample, int comp_l, int comp_m, int r, int s,
             const WindowRule& window, const TruncationRule& trunc,
             const Eigen::VectorXd& zeta_hat) {
  if (r < 2 || s < 2)
    throw std::invalid_argument("f_hat: r, s >= 2 required so all inner exponents are >= 2");
  const double term_ll = d_hat(sample, comp_l, comp_m, comp_l, comp_l, 2 * (r - 1),
                               2 * s, window, trunc, zeta_hat);
  const double term_lm = d_hat(sample, comp_l, comp_m, comp_l, comp_m, 2 * r - 1,
                               2 * s - 1, window, trunc, zeta_hat);
  const double term_mm = d_hat(sample, comp_l, comp_m, comp_m, comp_m, 2 * r,
                               2 * (s - 1), window, trunc, zeta_hat);
  return static_cast<double>(r) * r * term_ll +
         2.0 * static_cast<double>(r) * s * term_lm +
         static_cast<double>(s) * s * term_mm;
}

namespace {

// RV variance from a raw (uncorrected) spot path and a given zeta.
AvarReport rv_avar_core(const Eigen::Ref<const Eigen::ArrayXXd>& incr, int n,
                        RvAvarMode mode, const SimlResult& siml,
                        const Eigen::VectorXd& zeta, const Eigen::ArrayXd& raw_spot,
                        const WindowRule& window, const TruncationRule& trunc) {
  const double z1 = zeta(0);
  const Eigen::ArrayXd spot = corrected_spot(raw_spot, 2.0 * z1, true);

  AvarReport rep;
  rep.zeta_hat = zeta;
  rep.qv = siml.qv(0, 0);
  const int kn = window.k(n);
  rep.a2 = a_hat_from_path(spot, n, kn, 2);
  rep.a1 = a_hat_from_path(spot, n, kn, 1);

  double v;
  if (mode == RvAvarMode::continuous) {
    rep.which = "Vc";
    v = (2.0 * rep.a2 + 8.0 * z1 * rep.a1 + 12.0 * z1 * z1) / n;
  } else {
    rep.which = "Vj";
    rep.d11 = d11_from_path(incr, spot, 0, 0, trunc.threshold(n));
    v = (2.0 * rep.a2 + 4.0 * rep.d11 + 8.0 * z1 * rep.qv) / n;
  }
  if (v < 0.0) {
    v = 0.0;
    rep.floored = true;
  }
  rep.value = v;
  return rep;
}

// Cells where both components exceed the threshold: detected common jumps.
Eigen::ArrayXd cojump_gate(const Eigen::Ref<const Eigen::ArrayXXd>& incr,
                           double thr) {
  Eigen::ArrayXd gate(incr.rows());
  for (Eigen::Index i = 0; i < incr.rows(); ++i)
    gate(i) = (std::abs(incr(i, 0)) > thr && std::abs(incr(i, 1)) > thr) ? 1.0 : 0.0;
  return gate;
}

// Shared intermediates for the co-jump variance.
struct CojumpIngredients {
  Eigen::ArrayXd raw11, spot12, raw22;  // uncorrected window means
  Eigen::ArrayXd gate;                  // 1 on every cell for the plain set
  double j22 = 0.0, j42 = 0.0, j24 = 0.0;
};

CojumpIngredients gather_cojump_ingredients(
    const Eigen::Ref<const Eigen::ArrayXXd>& incr, const WindowRule& window,
    const TruncationRule& trunc, IngredientSet set) {
  const int n = static_cast<int>(incr.rows());
  CojumpIngredients ing;
  ing.raw11 = spot_cov_path(incr, 0, 0, window, trunc, 0.0);
  ing.spot12 = spot_cov_path(incr, 0, 1, window, trunc, 0.0);
  ing.raw22 = spot_cov_path(incr, 1, 1, window, trunc, 0.0);
  ing.gate = set == IngredientSet::cojump_truncated
                 ? cojump_gate(incr, trunc.threshold(n))
                 : Eigen::ArrayXd::Ones(n);
  ing.j22 = weighted_power_sum(incr, 0, 1, 2, 2, ing.gate);
  ing.j42 = weighted_power_sum(incr, 0, 1, 4, 2, ing.gate);
  ing.j24 = weighted_power_sum(incr, 0, 1, 2, 4, ing.gate);
  return ing;
}

// Co-jump variance from the shared ingredients and a given zeta.
AvarReport cojump_var_core(const Eigen::Ref<const Eigen::ArrayXXd>& incr, int n,
                           const Eigen::VectorXd& zeta, const CojumpIngredients& ing,
                           NoisePairing pairing, DenominatorPower denom) {
  AvarReport rep;
  rep.which = zeta.isZero() ? "Vjt" : "Vj12";
  rep.zeta_hat = zeta;
  rep.j22 = ing.j22;
  rep.j42 = ing.j42;
  rep.j24 = ing.j24;

  if (ing.j22 < 1e-12) {
    rep.no_mass = true;
    rep.value = 0.0;
    return rep;
  }

  const Eigen::ArrayXd c11 =
      corrected_spot(ing.raw11, 2.0 * zeta(0), true) * ing.gate;
  const Eigen::ArrayXd c12 = ing.spot12 * ing.gate;
  const Eigen::ArrayXd c22 =
      corrected_spot(ing.raw22, 2.0 * zeta(1), true) * ing.gate;
  const double d24 = weighted_power_sum(incr, 0, 1, 2, 4, c11);
  const double d33 = weighted_power_sum(incr, 0, 1, 3, 3, c12);
  const double d42 = weighted_power_sum(incr, 0, 1, 4, 2, c22);
  rep.f22 = 4.0 * d24 + 8.0 * d33 + 4.0 * d42;

  const double noise_terms = pairing == NoisePairing::theorem1
                                 ? 8.0 * (zeta(1) * ing.j42 + zeta(0) * ing.j24)
                                 : 8.0 * (zeta(1) * ing.j24 + zeta(0) * ing.j42);
  const double denominator =
      denom == DenominatorPower::squared ? n * ing.j22 * ing.j22 : n * ing.j22;
  double v = (rep.f22 + noise_terms) / denominator;
  if (v < 0.0) {
    v = 0.0;
    rep.floored = true;
  }
  rep.value = v;
  return rep;
}

}  // namespace

AvarReport rv_avar(const NoisySample& sample, RvAvarMode mode, const SimlConfig& cfg,
                   const WindowRule& window, const TruncationRule& trunc,
                   std::optional<Eigen::VectorXd> zeta_override,
                   const SimlBasis* basis) {
  if (sample.d() != 1)
    throw std::invalid_argument("rv_avar: univariate sample required");
  const int n = sample.n();
  const Eigen::ArrayXXd incr = sample.increments();
  const SimlResult siml = siml_qv(sample, cfg, basis);
  const Eigen::VectorXd zeta = zeta_override ? *zeta_override : siml.zeta_hat;
  const Eigen::ArrayXd raw = spot_cov_path(incr, 0, 0, window, trunc, 0.0);
  return rv_avar_core(incr, n, mode, siml, zeta, raw, window, trunc);
}

RvAnalysis analyze_rv_sample(const NoisySample& sample, RvAvarMode mode,
                             const SimlConfig& cfg, const WindowRule& window,
                             const TruncationRule& trunc, const SimlBasis* basis) {
  if (sample.d() != 1)
    throw std::invalid_argument("analyze_rv_sample: univariate sample required");
  const int n = sample.n();
  const Eigen::ArrayXXd incr = sample.increments();

  RvAnalysis out;
  out.siml = siml_qv(sample, cfg, basis);
  const Eigen::ArrayXd raw = spot_cov_path(incr, 0, 0, window, trunc, 0.0);
  out.corrected = rv_avar_core(incr, n, mode, out.siml, out.siml.zeta_hat, raw,
                               window, trunc);
  out.uncorrected = rv_avar_core(incr, n, mode, out.siml, Eigen::VectorXd::Zero(1),
                                 raw, window, trunc);
  return out;
}

AvarReport cojump_avar(const NoisySample& sample, const SimlConfig& cfg,
                       const WindowRule& window, const TruncationRule& trunc,
                       NoisePairing pairing, DenominatorPower denom,
                       IngredientSet ingredients,
                       std::optional<Eigen::VectorXd> zeta_override,
                       const SimlBasis* basis) {
  if (sample.d() != 2) throw std::invalid_argument("cojump_avar: d = 2 required");
  const int n = sample.n();
  const Eigen::ArrayXXd incr = sample.increments();

  const SimlResult siml = siml_qv(sample, cfg, basis);
  const Eigen::VectorXd zeta = zeta_override ? *zeta_override : siml.zeta_hat;

  const CojumpIngredients ing =
      gather_cojump_ingredients(incr, window, trunc, ingredients);
  AvarReport rep = cojump_var_core(incr, n, zeta, ing, pairing, denom);
  if (rep.no_mass) {
    std::ostringstream msg;
    msg << "cojump_avar: no detected co-jump mass (J(2,2) = " << rep.j22
        << "); test not applicable";
    throw DegenerateStatistic(msg.str());
  }
  return rep;
}

CojumpVariancePair cojump_avar_pair(const NoisySample& sample, const SimlConfig& cfg,
                                    const WindowRule& window,
                                    const TruncationRule& trunc, NoisePairing pairing,
                                    DenominatorPower denom, IngredientSet ingredients,
                                    const SimlBasis* basis) {
  if (sample.d() != 2)
    throw std::invalid_argument("cojump_avar_pair: d = 2 required");
  const int n = sample.n();
  const Eigen::ArrayXXd incr = sample.increments();

  CojumpVariancePair out;
  out.siml = siml_qv(sample, cfg, basis);
  const CojumpIngredients ing =
      gather_cojump_ingredients(incr, window, trunc, ingredients);
  out.corrected = cojump_var_core(incr, n, out.siml.zeta_hat, ing, pairing, denom);
  out.jt = cojump_var_core(incr, n, Eigen::VectorXd::Zero(2), ing, pairing, denom);
  return out;
}

}  // namespace smallnoise
