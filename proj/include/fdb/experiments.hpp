#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fdb/estimator.hpp"

namespace fdb {

enum class NormalizerPolicy {
  PerDraw,     // beta chosen per trial so f(theta) equals f_target exactly
  Expectation  // beta = (E h)^{-d} fixed per dimension, E f = 1 * f_target
};

struct SimulationConfig {
  std::size_t n = 10000;  // per-axis noise variance is 1/n
  std::vector<double> alpha_grid = {0.40, 0.45, 0.50, 0.55, 0.60,
                                    0.65, 0.70, 0.75, 0.80, 0.85};
  std::size_t trials = 2000;
  BaseFunction base = BaseFunction::power275();
  double smoothness = 2.75;  // nominal s for reference lines
  long cutoff_k = 20;
  std::size_t grid_m = 1024;
  double theta_lo = 0.4, theta_hi = 0.6;
  std::uint64_t seed = 1;
  NormalizerPolicy normalizer = NormalizerPolicy::PerDraw;
  double f_target = 0.1;
  bool adaptive = false;     // draw true n-batches, run the unknown-covariance path
  bool fixed_theta = false;  // one theta per row instead of fresh per trial
  bool mirror = true;
  bool dyadic = false;
  bool serial = false;  // reference execution path (no worker pool)

  // Test hook: hand the adaptive path the true covariance and level.
  bool force_true_sigma = false;
};

struct SimulationRow {
  double alpha = 0.0;
  std::size_t d = 0;
  double threshold = 0.0;  // 1/(1-alpha)
  double plugin_bias = 0.0, tf_bias = 0.0, adaptive_bias = 0.0;
  double plugin_var = 0.0, tf_var = 0.0, adaptive_var = 0.0;
  double plugin_mse = 0.0, tf_mse = 0.0, adaptive_mse = 0.0;
  double plugin_se = 0.0, tf_se = 0.0, adaptive_se = 0.0;  // MC se of the bias
  double ref_half = 0.0;    // (d/n)^{s/2}
  double ref_full = 0.0;    // (d/n)^s
  double ref_sqrt_n = 0.0;  // n^{-1/2}
  double ref_inv_n = 0.0;   // n^{-1}
};

struct AdaptiveDiffRow {
  double alpha = 0.0;
  std::size_t d = 0;
  double mean_diff = 0.0;  // mean of g(x_bar) - g_hat(x_bar)
  double var_diff = 0.0;
};

std::size_t dimension_for_alpha(std::size_t n, double alpha);  // round(n^alpha)

struct ReferenceValues {
  double ref_half, ref_full, ref_sqrt_n, ref_inv_n;
};
ReferenceValues reference_lines(std::size_t n, double alpha, double s);

// mean of h under U[lo,hi] via adaptive Simpson quadrature to 1e-10; beta =
// mean^{-d} so that E prod h(theta_j) * beta = 1 under independence.
double normalizer_beta(const std::function<double(double)>& h, std::size_t d, double lo,
                       double hi);
double normalizer_beta(const BaseFunction& h, std::size_t d, double lo, double hi);

// The Monte Carlo sweep over the alpha grid: per trial draw theta, draw the
// observation (batch mean when adaptive, direct mean-law sample otherwise),
// evaluate plug-in / debiased / adaptive estimators, aggregate signed-error
// mean (bias), population variance, mse = bias^2 + variance.
std::vector<SimulationRow> run_sweep(const SimulationConfig& cfg);

// Paired study of g(x_bar) - g_hat(x_bar); forces the adaptive path on.
std::vector<AdaptiveDiffRow> run_adaptive_diff(const SimulationConfig& cfg);

struct LowerBoundConfig {
  int d = 1;  // <= 10: the mixture has 2^d components
  double sigma = 1.0;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  double smoothness = 2.75;
};

struct LowerBoundResult {
  double ratio = 0.0;  // E sum phi_i^2 / (sum phi_i)^2
  double mc_se = 0.0;
  double eps = 0.0;
  double reference = 0.0;          // (3/4)^d
  double risk_lower_bound = 0.0;   // d * eps^{2s} * (1 - ratio)
};

// Monte Carlo check of the Bayes-risk ratio behind the minimax lower bound:
// prior uniform on the 2^d scaled hypercube vertices theta_i = 8 eps v_i /
// sqrt(d), posterior-moment ratio computed with log-sum-exp stabilization.
LowerBoundResult bayes_risk_lower_bound(const LowerBoundConfig& cfg);

struct NormalCheckConfig {
  BaseFunction f = BaseFunction::cosine();  // cosine or linear
  double theta = 0.3;
  double sigma = 0.01;  // noise standard deviation
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  long cutoff_k = 20;
  std::size_t grid_m = 1024;
};

struct NormalCheckReport {
  double ks = 0.0;             // sup |empirical CDF - standard normal CDF|
  double sigma_f = 0.0;        // sensitivity sqrt(<Sigma grad f, grad f>)
  double mean_std_error = 0.0; // mean of standardized errors
  double k_ratio = 0.0;        // ||Sigma||^{1/2} * besov proxy / sigma_f
  std::size_t trials = 0;
};

// Standardize (g(x) - f(theta)) / sigma_f over trials and measure the
// two-sided Kolmogorov-Smirnov distance to the standard normal.
NormalCheckReport normal_check(const NormalCheckConfig& cfg);

double standard_normal_cdf(double z);

}  // namespace fdb
