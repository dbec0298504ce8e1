#include "fdb/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdb {

std::vector<std::vector<double>> successive_differences(const SampleBatch& batch) {
  const std::size_t n = batch.size();
  if (n < 2) throw std::invalid_argument("successive differences: need n >= 2 observations");
  const std::size_t d = batch.dim();
  std::vector<std::vector<double>> diffs;
  diffs.reserve(n - 1);
  std::vector<double> running = batch.observations[0];  // mean of x_1..x_{j-1}
  for (std::size_t j = 2; j <= n; ++j) {
    const auto& xj = batch.observations[j - 1];
    const double scale = std::sqrt(static_cast<double>(j - 1) / static_cast<double>(j));
    std::vector<double> beta(d);
    for (std::size_t i = 0; i < d; ++i) beta[i] = scale * (xj[i] - running[i]);
    diffs.push_back(std::move(beta));
    const double jd = static_cast<double>(j);
    for (std::size_t i = 0; i < d; ++i) running[i] += (xj[i] - running[i]) / jd;
  }
  return diffs;
}

AdaptiveState estimate_covariance(const std::vector<std::vector<double>>& diffs, std::size_t n,
                                  bool dense) {
  if (diffs.empty()) throw std::invalid_argument("estimate_covariance: no difference vectors");
  if (n < 2) throw std::invalid_argument("estimate_covariance: need n >= 2");
  const std::size_t d = diffs.front().size();
  const double denom = static_cast<double>(n - 1);

  AdaptiveState st;
  st.n = n;
  st.sigma0_diag.assign(d, 0.0);
  for (const auto& b : diffs)
    for (std::size_t i = 0; i < d; ++i) st.sigma0_diag[i] += b[i] * b[i];
  for (auto& v : st.sigma0_diag) v /= denom;

  if (dense) {
    st.sigma0_dense.assign(d * d, 0.0);
    for (const auto& b : diffs)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) st.sigma0_dense[i * d + j] += b[i] * b[j] / denom;
    st.op_norm_hat = Covariance::dense(d, st.sigma0_dense).operator_norm();
  } else {
    st.op_norm_hat = *std::max_element(st.sigma0_diag.begin(), st.sigma0_diag.end());
  }

  st.trace_hat = 0.0;
  for (double v : st.sigma0_diag) st.trace_hat += v;
  st.no_frequency_budget = static_cast<double>(n) <= st.trace_hat;
  st.n_hat = adaptive_cutoff(st.trace_hat, n);
  return st;
}

double adaptive_cutoff(double trace_hat, std::size_t n) {
  if (!(trace_hat > 0.0)) throw std::invalid_argument("adaptive_cutoff: trace must be positive");
  if (n < 2) throw std::invalid_argument("adaptive_cutoff: need n >= 2");
  const double level = 0.5 * std::log2(static_cast<double>(n) / trace_hat) - 1.0;
  return level > 0.0 ? level : 0.0;
}

StreamingBatch::StreamingBatch(std::size_t d) : d_(d), mean_(d, 0.0), m2_(d, 0.0) {}

void StreamingBatch::add(const std::vector<double>& x) {
  if (x.size() != d_) throw std::invalid_argument("streaming batch: dimension mismatch");
  add(x.data());
}

void StreamingBatch::add(const double* x) {
  ++n_;
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < d_; ++i) {
    const double delta = x[i] - mean_[i];
    mean_[i] += delta * inv;
    m2_[i] += delta * (x[i] - mean_[i]);
  }
}

std::vector<double> StreamingBatch::sigma0_diag() const {
  if (n_ < 2) throw std::logic_error("streaming batch: need n >= 2");
  std::vector<double> out(m2_);
  for (auto& v : out) v /= static_cast<double>(n_ - 1);
  return out;
}

double StreamingBatch::trace_hat() const {
  if (n_ < 2) throw std::logic_error("streaming batch: need n >= 2");
  double t = 0.0;
  for (double v : m2_) t += v;
  return t / static_cast<double>(n_ - 1);
}

long map_level_to_cutoff(double n_hat, double reference_level, long reference_k, long max_k) {
  const double mapped =
      static_cast<double>(reference_k) * std::exp2(n_hat - reference_level);
  long k = static_cast<long>(std::llround(mapped));
  if (k < 0) k = 0;
  if (k > max_k) k = max_k;
  return k;
}

AdaptiveReport adaptive_estimate(const SampleBatch& batch, const ProductFunction& f,
                                 const AdaptiveConfig& cfg) {
  const std::size_t d = batch.dim();
  if (d != f.dim) throw std::invalid_argument("adaptive_estimate: dimension mismatch");

  AdaptiveState st;
  if (cfg.force_sigma) {
    // White-box hook: use the supplied covariance as Sigma_hat directly.
    st.n = batch.size();
    st.sigma0_diag.resize(d);
    for (std::size_t i = 0; i < d; ++i)
      st.sigma0_diag[i] = cfg.force_sigma->diag_at(i) * static_cast<double>(batch.size());
    st.trace_hat = 0.0;
    for (double v : st.sigma0_diag) st.trace_hat += v;
    st.n_hat = adaptive_cutoff(st.trace_hat, batch.size());
  } else {
    st = estimate_covariance(successive_differences(batch), batch.size(),
                             cfg.tensor && d <= 3);
  }
  if (cfg.force_level) st.n_hat = *cfg.force_level;

  GridFunction1D base_grid = f.base.sample(cfg.grid_m);
  if (cfg.mirror && !f.base.periodic())
    base_grid = mirror_extend(base_grid, f.base.value(f.base.domain_hi()));
  const Spectrum1D spec = analyze(base_grid);

  AdaptiveReport rep;
  rep.n_hat = st.n_hat;
  rep.trace_hat = st.trace_hat;
  const double n_inv = 1.0 / static_cast<double>(batch.size());

  if (cfg.dyadic) {
    const int level = static_cast<int>(std::ceil(st.n_hat));
    rep.k_hat = -1;
    double value = f.beta;
    for (std::size_t i = 0; i < d; ++i) {
      const double v_i = st.sigma0_diag[i] * n_inv;
      const auto ev = build_debiased_1d(spec, v_i, TruncationChoice::dyadic(level));
      value *= ev.evaluate(batch.mean[i]);
    }
    rep.value = value;
    return rep;
  }

  rep.k_hat = map_level_to_cutoff(st.n_hat, cfg.reference_level, cfg.cutoff_k, spec.max_index());

  if (cfg.tensor && d <= 3 && !st.sigma0_dense.empty()) {
    // Full Sigma_hat on the tensor path (off-diagonal terms included).
    std::vector<double> sigma_hat(st.sigma0_dense);
    for (auto& v : sigma_hat) v *= n_inv;
    const Covariance cov = Covariance::dense(d, sigma_hat);
    const std::vector<Spectrum1D> axes(d, spec);
    const std::vector<long> ks(d, rep.k_hat);
    const TensorEvaluator ev = build_tensor_evaluator(axes, cov, ks);
    rep.value = f.beta * ev.evaluate(batch.mean);
    return rep;
  }

  double value = f.beta;
  for (std::size_t i = 0; i < d; ++i) {
    const double v_i = (cfg.force_sigma ? cfg.force_sigma->diag_at(i)
                                        : st.sigma0_diag[i] * n_inv);
    const auto ev = build_debiased_1d(spec, v_i, TruncationChoice::hard(rep.k_hat));
    value *= ev.evaluate(batch.mean[i]);
  }
  rep.value = value;
  return rep;
}

}  // namespace fdb
