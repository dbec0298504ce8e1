#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fdb/covariance.hpp"
#include "fdb/estimator.hpp"
#include "fdb/model.hpp"

namespace fdb {

// Unknown-covariance pipeline state built from one observation batch.
struct AdaptiveState {
  std::vector<double> sigma0_diag;   // per-coordinate variance estimates
  std::vector<double> sigma0_dense;  // d*d row-major; empty in streaming mode
  double trace_hat = 0.0;
  double op_norm_hat = 0.0;  // max coord variance (diag) / power iteration (dense)
  double n_hat = 0.0;        // adaptive cutoff level, clamped at 0
  bool no_frequency_budget = false;  // n <= trace_hat: nothing retainable
  std::size_t n = 0;
};

// beta_j = sqrt((j-1)/j) * (x_j - mean(x_1..x_{j-1})), j = 2..n. These are
// i.i.d. N(0, Sigma0) regardless of the common shift theta, which is what
// makes covariance estimation possible without knowing theta.
std::vector<std::vector<double>> successive_differences(const SampleBatch& batch);

// Sigma0_hat = (n-1)^{-1} sum_j beta_j beta_j^T; dense matrix kept only on
// request (the simulation sweep would otherwise allocate d^2 doubles per
// trial at d ~ 2500).
AdaptiveState estimate_covariance(const std::vector<std::vector<double>>& diffs, std::size_t n,
                                  bool dense = false);

// 0.5 * log2(n / trace_hat) - 1, clamped below at zero. Real-valued: the
// level estimate is consumed as a ratio against a reference level, never
// rounded here.
double adaptive_cutoff(double trace_hat, std::size_t n);

// Streaming batch statistics: one pass, O(d) memory. M2 accumulates
// sum_j (x_j - mean_{j-1})(x_j - mean_j) per coordinate, which equals
// sum_j beta_j^2 exactly, so finalize() agrees with the materialized path.
class StreamingBatch {
 public:
  explicit StreamingBatch(std::size_t d);

  void add(const std::vector<double>& x);
  void add(const double* x);

  std::size_t count() const { return n_; }
  const std::vector<double>& mean() const { return mean_; }
  // Per-coordinate Sigma0_hat diagonal = M2 / (n - 1).
  std::vector<double> sigma0_diag() const;
  double trace_hat() const;

 private:
  std::size_t d_, n_ = 0;
  std::vector<double> mean_, m2_;
};

struct AdaptiveConfig {
  long cutoff_k = 20;            // per-axis budget at the reference level
  double reference_level = 0.0;  // unrounded level of the configured covariance
  bool dyadic = false;           // ceil(n_hat) Littlewood-Paley mode
  std::size_t grid_m = 1024;
  bool mirror = true;
  bool tensor = false;  // d <= 3: full Sigma_hat on the tensor path

  // White-box hooks for pipeline tests: force the estimated covariance
  // and/or level to known values.
  std::optional<Covariance> force_sigma;   // used as Sigma_hat (= Sigma0/n already applied)
  std::optional<double> force_level;
};

struct AdaptiveReport {
  double value = 0.0;  // g_hat(x_bar)
  double n_hat = 0.0;
  long k_hat = 0;
  double trace_hat = 0.0;
};

// Full pipeline: differences -> Sigma_hat -> n_hat -> per-axis debiased
// evaluators with noise variance from diag(Sigma_hat) -> evaluate at the
// batch mean. Hard-cutoff mode maps the level to a per-axis index budget by
// K_hat = round(K * 2^{n_hat - reference_level}).
AdaptiveReport adaptive_estimate(const SampleBatch& batch, const ProductFunction& f,
                                 const AdaptiveConfig& cfg);

long map_level_to_cutoff(double n_hat, double reference_level, long reference_k, long max_k);

}  // namespace fdb
