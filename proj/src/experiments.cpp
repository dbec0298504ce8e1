#include "fdb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fdb/adaptive.hpp"
#include "fdb/errors.hpp"
#include "fdb/parallel.hpp"
#include "fdb/rng.hpp"

namespace fdb {

namespace {

double fold_to_domain(double x, double a, double b) {
  if (x >= a && x < b) return x;
  const double period = b - a;
  double y = std::fmod(x - a, period);
  if (y < 0.0) y += period;
  return a + y;
}

void rethrow_first(const std::vector<std::exception_ptr>& errs) {
  for (const auto& e : errs)
    if (e) std::rethrow_exception(e);
}

struct Moments {
  double bias_abs = 0.0, var = 0.0, mse = 0.0, se = 0.0;
};

// Two-pass aggregation; var is the population variance so that
// mse = var + mean^2 equals the mean squared error identically.
Moments error_moments(const std::vector<double>& err) {
  Moments m;
  if (err.empty()) return m;
  const double mean = pairwise_mean(err);
  std::vector<double> sq(err.size());
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double c = err[i] - mean;
    sq[i] = c * c;
  }
  m.var = pairwise_mean(sq);
  m.bias_abs = std::fabs(mean);
  m.mse = m.var + mean * mean;
  m.se = std::sqrt(m.var / static_cast<double>(err.size()));
  return m;
}

void validate_sweep_config(const SimulationConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("simulate: need n >= 2");
  if (cfg.trials < 1) throw ConfigError("simulate: need at least one trial");
  if (cfg.alpha_grid.empty()) throw ConfigError("simulate: empty alpha grid");
  for (double a : cfg.alpha_grid)
    if (!(a > 0.0) || !(a < 1.0)) throw ConfigError("simulate: alpha must lie in (0,1)");
  if (cfg.grid_m < 2 || cfg.grid_m % 2 != 0)
    throw ConfigError("simulate: grid size must be even and >= 2");
  if (cfg.cutoff_k < 0) throw ConfigError("simulate: cutoff must be nonnegative");
  if (!(cfg.theta_lo < cfg.theta_hi))
    throw ConfigError("simulate: need theta_lo < theta_hi");
  if (cfg.f_target == 0.0) throw ConfigError("simulate: f_target must be nonzero");
  if (!(cfg.smoothness > 0.0)) throw ConfigError("simulate: smoothness must be positive");
}

Spectrum1D base_spectrum(const BaseFunction& base, std::size_t grid_m, bool mirror) {
  GridFunction1D g = base.sample(grid_m);
  if (mirror && !base.periodic()) g = mirror_extend(g, base.value(base.domain_hi()));
  return analyze(g);
}

struct RowAccum {
  std::vector<double> plugin_err, tf_err, ad_err, diff;
};

// One alpha row: per trial draw theta, draw the observation, evaluate the
// three estimators, record signed errors (and the known-vs-adaptive value
// difference when requested). Trials are independent streams keyed by
// (seed, row, trial) and write into their own slots, so the result is
// identical under any worker count.
RowAccum simulate_row(const SimulationConfig& cfg, const Spectrum1D& spec, std::size_t row,
                      double alpha, bool want_diff) {
  const std::size_t d = dimension_for_alpha(cfg.n, alpha);
  const double v = 1.0 / static_cast<double>(cfg.n);
  const double sq = std::sqrt(v);

  const TruncationChoice row_cut =
      cfg.dyadic ? TruncationChoice::dyadic(cutoff_level(v, static_cast<double>(d)))
                 : TruncationChoice::hard(cfg.cutoff_k);
  std::optional<DebiasedEvaluator1D> ev;
  try {
    ev.emplace(build_debiased_1d(spec, v, row_cut));
  } catch (const OverflowGuardError& e) {
    std::ostringstream msg;
    msg << e.what() << " [alpha=" << alpha << ", d=" << d << "]";
    throw OverflowGuardError(msg.str(), e.index);
  }
  const double ev_a = ev->a(), ev_b = ev->b();

  double ref_level = cutoff_level_value(v, static_cast<double>(d));
  if (ref_level < 0.0) ref_level = 0.0;

  const bool per_draw = cfg.normalizer == NormalizerPolicy::PerDraw;
  const double beta_fixed =
      per_draw ? 0.0
               : cfg.f_target * normalizer_beta(cfg.base, d, cfg.theta_lo, cfg.theta_hi);

  std::vector<double> theta_row;
  if (cfg.fixed_theta) {
    Rng rng(derive_stream(cfg.seed, row, 0xFFFFFFFFull));
    theta_row.resize(d);
    for (auto& t : theta_row) t = rng.uniform(cfg.theta_lo, cfg.theta_hi);
  }

  // Reciprocal table for the streaming mean update in batch mode.
  std::vector<double> invj;
  if (cfg.adaptive) {
    invj.resize(cfg.n + 1);
    for (std::size_t j = 1; j <= cfg.n; ++j) invj[j] = 1.0 / static_cast<double>(j);
  }

  RowAccum acc;
  acc.plugin_err.resize(cfg.trials);
  acc.tf_err.resize(cfg.trials);
  if (cfg.adaptive) acc.ad_err.resize(cfg.trials);
  if (want_diff) acc.diff.resize(cfg.trials);
  std::vector<std::exception_ptr> errs(cfg.trials);

  parallel_for(
      cfg.trials,
      [&](std::size_t t) {
        try {
          Rng rng(derive_stream(cfg.seed, row, t));
          double prodh = 1.0, plugin_prod = 1.0, tf_prod = 1.0;
          double tf_val = 0.0, ad_val = 0.0;

          if (!cfg.adaptive) {
            for (std::size_t c = 0; c < d; ++c) {
              const double th =
                  cfg.fixed_theta ? theta_row[c] : rng.uniform(cfg.theta_lo, cfg.theta_hi);
              prodh *= cfg.base.value(th);
              const double xc = th + sq * rng.normal();
              plugin_prod *= cfg.base.value(xc);
              tf_prod *= ev->evaluate(fold_to_domain(xc, ev_a, ev_b));
            }
          } else {
            std::vector<double> xbar(d), vhat(d);
            double trace0 = 0.0;  // trace of the per-observation covariance estimate
            for (std::size_t c = 0; c < d; ++c) {
              const double th =
                  cfg.fixed_theta ? theta_row[c] : rng.uniform(cfg.theta_lo, cfg.theta_hi);
              prodh *= cfg.base.value(th);
              double mean = 0.0, m2 = 0.0;
              for (std::size_t j = 1; j <= cfg.n; ++j) {
                const double x = th + rng.normal();
                const double delta = x - mean;
                mean += delta * invj[j];
                m2 += delta * (x - mean);
              }
              xbar[c] = mean;
              const double s0 = m2 / static_cast<double>(cfg.n - 1);
              trace0 += s0;
              vhat[c] = s0 * v;  // variance of the batch mean
            }

            long k_hat = cfg.cutoff_k;
            int level_hat = 0;
            if (!cfg.force_true_sigma) {
              const double n_hat = adaptive_cutoff(trace0, cfg.n);
              if (cfg.dyadic)
                level_hat = static_cast<int>(std::ceil(n_hat));
              else
                k_hat = map_level_to_cutoff(n_hat, ref_level, cfg.cutoff_k, spec.max_index());
            }

            for (std::size_t c = 0; c < d; ++c) {
              const double xf = fold_to_domain(xbar[c], ev_a, ev_b);
              const double tfc = ev->evaluate(xf);
              tf_prod *= tfc;
              plugin_prod *= cfg.base.value(xbar[c]);
              double adc;
              if (cfg.force_true_sigma) {
                adc = tfc;  // known covariance handed to the adaptive path verbatim
              } else {
                const TruncationChoice cut = cfg.dyadic ? TruncationChoice::dyadic(level_hat)
                                                        : TruncationChoice::hard(k_hat);
                adc = build_debiased_1d(spec, vhat[c], cut).evaluate(xf);
              }
              ad_val = (c == 0) ? adc : ad_val * adc;
            }
          }

          const double beta_t = per_draw ? cfg.f_target / prodh : beta_fixed;
          const double ftheta = per_draw ? cfg.f_target : beta_t * prodh;
          tf_val = beta_t * tf_prod;
          acc.plugin_err[t] = beta_t * plugin_prod - ftheta;
          acc.tf_err[t] = tf_val - ftheta;
          if (cfg.adaptive) {
            ad_val *= beta_t;
            acc.ad_err[t] = ad_val - ftheta;
            if (want_diff) acc.diff[t] = tf_val - ad_val;
          }
        } catch (...) {
          errs[t] = std::current_exception();
        }
      },
      cfg.serial);

  rethrow_first(errs);
  return acc;
}

double besov_proxy(const Spectrum1D& spec, double s) {
  // Dyadic frequency blocks: block 0 is |zeta| < 2, block j >= 1 is
  // [2^j, 2^{j+1}). Sum of 2^{js} * max block magnitude.
  std::vector<double> block_max;
  for (long k = 0; k <= spec.max_index(); ++k) {
    const double zeta = spec.frequency(k);
    const int j = zeta < 2.0 ? 0 : static_cast<int>(std::floor(std::log2(zeta)));
    if (block_max.size() <= static_cast<std::size_t>(j)) block_max.resize(j + 1, 0.0);
    block_max[j] = std::max(block_max[j], std::abs(spec.coefficient(k)));
  }
  double total = 0.0;
  for (std::size_t j = 0; j < block_max.size(); ++j)
    total += std::exp2(s * static_cast<double>(j)) * block_max[j];
  return total;
}

}  // namespace

std::size_t dimension_for_alpha(std::size_t n, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  const long long d = std::llround(std::pow(static_cast<double>(n), alpha));
  return static_cast<std::size_t>(std::max(d, 1ll));
}

ReferenceValues reference_lines(std::size_t n, double alpha, double s) {
  const double d = static_cast<double>(dimension_for_alpha(n, alpha));
  const double ratio = d / static_cast<double>(n);
  ReferenceValues r;
  r.ref_half = std::pow(ratio, s / 2.0);
  r.ref_full = std::pow(ratio, s);
  r.ref_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  r.ref_inv_n = 1.0 / static_cast<double>(n);
  return r;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double sum = left + right;
  if (depth <= 0 || std::fabs(sum - whole) <= 15.0 * tol)
    return sum + (sum - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double normalizer_beta(const std::function<double(double)>& h, std::size_t d, double lo,
                       double hi) {
  if (!(lo < hi)) throw ConfigError("normalizer: need lo < hi");
  if (d == 0) return 1.0;
  const double mean = integrate(h, lo, hi, 1e-10) / (hi - lo);
  if (!(mean > 0.0))
    throw ConfigError("normalizer: base function mean is not positive on the theta range");
  return std::pow(mean, -static_cast<double>(d));
}

double normalizer_beta(const BaseFunction& h, std::size_t d, double lo, double hi) {
  return normalizer_beta([&](double x) { return h.value(x); }, d, lo, hi);
}

std::vector<SimulationRow> run_sweep(const SimulationConfig& cfg) {
  validate_sweep_config(cfg);
  const Spectrum1D spec = base_spectrum(cfg.base, cfg.grid_m, cfg.mirror);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<SimulationRow> rows;
  rows.reserve(cfg.alpha_grid.size());
  for (std::size_t r = 0; r < cfg.alpha_grid.size(); ++r) {
    const double alpha = cfg.alpha_grid[r];
    RowAccum acc = simulate_row(cfg, spec, r, alpha, false);

    SimulationRow row;
    row.alpha = alpha;
    row.d = dimension_for_alpha(cfg.n, alpha);
    row.threshold = 1.0 / (1.0 - alpha);
    const ReferenceValues ref = reference_lines(cfg.n, alpha, cfg.smoothness);
    row.ref_half = ref.ref_half;
    row.ref_full = ref.ref_full;
    row.ref_sqrt_n = ref.ref_sqrt_n;
    row.ref_inv_n = ref.ref_inv_n;

    const Moments pm = error_moments(acc.plugin_err);
    row.plugin_bias = pm.bias_abs;
    row.plugin_var = pm.var;
    row.plugin_mse = pm.mse;
    row.plugin_se = pm.se;
    const Moments tm = error_moments(acc.tf_err);
    row.tf_bias = tm.bias_abs;
    row.tf_var = tm.var;
    row.tf_mse = tm.mse;
    row.tf_se = tm.se;
    if (cfg.adaptive) {
      const Moments am = error_moments(acc.ad_err);
      row.adaptive_bias = am.bias_abs;
      row.adaptive_var = am.var;
      row.adaptive_mse = am.mse;
      row.adaptive_se = am.se;
    } else {
      row.adaptive_bias = row.adaptive_var = row.adaptive_mse = row.adaptive_se = nan;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<AdaptiveDiffRow> run_adaptive_diff(const SimulationConfig& cfg) {
  SimulationConfig c = cfg;
  c.adaptive = true;
  validate_sweep_config(c);
  const Spectrum1D spec = base_spectrum(c.base, c.grid_m, c.mirror);

  std::vector<AdaptiveDiffRow> rows;
  rows.reserve(c.alpha_grid.size());
  for (std::size_t r = 0; r < c.alpha_grid.size(); ++r) {
    const double alpha = c.alpha_grid[r];
    RowAccum acc = simulate_row(c, spec, r, alpha, true);
    AdaptiveDiffRow row;
    row.alpha = alpha;
    row.d = dimension_for_alpha(c.n, alpha);
    row.mean_diff = pairwise_mean(acc.diff);
    std::vector<double> sq(acc.diff.size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
      const double dd = acc.diff[i] - row.mean_diff;
      sq[i] = dd * dd;
    }
    row.var_diff = pairwise_mean(sq);
    rows.push_back(row);
  }
  return rows;
}

LowerBoundResult bayes_risk_lower_bound(const LowerBoundConfig& cfg) {
  if (cfg.d < 1 || cfg.d > 10)
    throw ConfigError("lower bound: d must lie in 1..10 (the mixture has 2^d components)");
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma))
    throw ConfigError("lower bound: sigma must be positive");
  if (cfg.trials < 2) throw ConfigError("lower bound: need at least 2 trials");
  if (!(cfg.smoothness > 0.0)) throw ConfigError("lower bound: smoothness must be positive");

  const int d = cfg.d;
  const std::size_t M = std::size_t{1} << d;
  // Vertex separation constant: eps is chosen so the scaled hypercube prior
  // keeps the posterior-moment ratio below the (3/4)^d envelope.
  const double kSeparation = 39.460855398022908;
  const double eps =
      std::min(cfg.sigma * std::sqrt(static_cast<double>(d)) / kSeparation, 0.125);
  const double scale = 8.0 * eps / std::sqrt(static_cast<double>(d));
  const double inv_two_sigma2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);

  std::vector<double> ratio_t(cfg.trials);
  std::vector<std::exception_ptr> errs(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t t) {
    try {
      Rng rng(derive_stream(cfg.seed, 0, t));
      const std::size_t pick = rng.next_u64() & (M - 1);
      double x[10];
      // Sign-vertex component: theta_i = (8 eps / sqrt(d)) * v_i, v_i in
      // {-1,+1}^d, so every ||theta_i|| = 8 eps and the minimum pairwise
      // separation is 16 eps / sqrt(d).
      for (int c = 0; c < d; ++c) {
        const double vertex = (pick >> c) & 1u ? scale : -scale;
        x[c] = vertex + cfg.sigma * rng.normal();
      }
      // Log-likelihoods against every mixture component, stabilized by the
      // running maximum before exponentiation.
      double lmax = -std::numeric_limits<double>::infinity();
      std::vector<double> L(M);
      for (std::size_t j = 0; j < M; ++j) {
        double s2 = 0.0;
        for (int c = 0; c < d; ++c) {
          const double diff = x[c] - ((j >> c) & 1u ? scale : -scale);
          s2 += diff * diff;
        }
        L[j] = -s2 * inv_two_sigma2;
        lmax = std::max(lmax, L[j]);
      }
      double e1 = 0.0, e2 = 0.0;
      for (std::size_t j = 0; j < M; ++j) {
        const double u = std::exp(L[j] - lmax);
        e1 += u;
        e2 += u * u;
      }
      // sum of squared posterior weights = exp(lse(2L) - 2 lse(L))
      ratio_t[t] = e2 / (e1 * e1);
    } catch (...) {
      errs[t] = std::current_exception();
    }
  });
  rethrow_first(errs);

  LowerBoundResult out;
  out.eps = eps;
  out.ratio = pairwise_mean(ratio_t);
  std::vector<double> sq(ratio_t.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double c = ratio_t[i] - out.ratio;
    sq[i] = c * c;
  }
  out.mc_se = std::sqrt(pairwise_mean(sq) / static_cast<double>(cfg.trials));
  out.reference = std::pow(0.75, d);
  out.risk_lower_bound =
      static_cast<double>(d) * std::pow(eps, 2.0 * cfg.smoothness) * (1.0 - out.ratio);
  return out;
}

NormalCheckReport normal_check(const NormalCheckConfig& cfg) {
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma))
    throw ConfigError("normal check: sigma must be positive");
  if (cfg.trials < 2) throw ConfigError("normal check: need at least 2 trials");
  if (cfg.grid_m < 2 || cfg.grid_m % 2 != 0)
    throw ConfigError("normal check: grid size must be even and >= 2");
  if (cfg.cutoff_k < 0) throw ConfigError("normal check: cutoff must be nonnegative");

  const double v = cfg.sigma * cfg.sigma;
  const Covariance cov = Covariance::scalar_identity(1, v);
  const ProductFunction f(cfg.f, 1, 1.0);
  const double ftheta = cfg.f.value(cfg.theta);
  const double sigma_f = sensitivity_sigma(f, {cfg.theta}, cov);
  if (!(sigma_f > 0.0))
    throw ConfigError(
        "normal check: sensitivity is zero at this theta; standardized errors are undefined");

  const Spectrum1D spec = base_spectrum(cfg.f, cfg.grid_m, true);
  // A ramp's transform is carried at frequency zero where the debiasing
  // multiplier equals one, so the estimator reduces to the identity.
  const bool identity = cfg.f.kind() == BaseFunction::Kind::Linear;
  std::optional<DebiasedEvaluator1D> ev;
  if (!identity) ev.emplace(build_debiased_1d(spec, v, TruncationChoice::hard(cfg.cutoff_k)));

  std::vector<double> z(cfg.trials);
  std::vector<std::exception_ptr> errs(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t t) {
    try {
      Rng rng(derive_stream(cfg.seed, 0, t));
      const double x = cfg.theta + cfg.sigma * rng.normal();
      const double gx =
          identity ? x : ev->evaluate(fold_to_domain(x, ev->a(), ev->b()));
      z[t] = (gx - ftheta) / sigma_f;
    } catch (...) {
      errs[t] = std::current_exception();
    }
  });
  rethrow_first(errs);

  NormalCheckReport rep;
  rep.trials = cfg.trials;
  rep.sigma_f = sigma_f;
  rep.mean_std_error = pairwise_mean(z);
  rep.k_ratio = std::sqrt(cov.operator_norm()) * besov_proxy(spec, 2.75) / sigma_f;

  std::sort(z.begin(), z.end());
  const double N = static_cast<double>(z.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double F = standard_normal_cdf(z[i]);
    ks = std::max(ks, std::max((static_cast<double>(i) + 1.0) / N - F,
                               F - static_cast<double>(i) / N));
  }
  rep.ks = ks;
  return rep;
}

double standard_normal_cdf(double zv) {
  return 0.5 * std::erfc(-zv / std::sqrt(2.0));
}

}  // namespace fdb
