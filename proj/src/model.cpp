#include "fdb/model.hpp"

#include <stdexcept>

namespace fdb {

ShiftModel::ShiftModel(std::vector<double> t, Covariance c)
    : theta(std::move(t)), covariance(std::move(c)) {
  if (theta.size() != covariance.dim())
    throw std::invalid_argument("shift model: theta and covariance dimensions disagree");
}

SequenceModelConfig::SequenceModelConfig(std::vector<double> t, Covariance c, std::size_t n)
    : theta(std::move(t)), base_covariance(std::move(c)), sample_count(n) {
  if (theta.size() != base_covariance.dim())
    throw std::invalid_argument("sequence model: theta and covariance dimensions disagree");
  if (sample_count < 2)
    throw std::invalid_argument("sequence model: need n >= 2 observations");
}

void add_noise(const Covariance& cov, const std::vector<double>& theta, Rng& rng,
               std::vector<double>& x) {
  const std::size_t d = theta.size();
  x.resize(d);
  if (cov.is_diagonal()) {
    for (std::size_t i = 0; i < d; ++i) x[i] = theta[i] + std::sqrt(cov.diag_at(i)) * rng.normal();
    return;
  }
  // Correlated draw: x = theta + L * g with L the lower Cholesky factor.
  const auto& L = cov.cholesky();
  std::vector<double> g(d);
  for (auto& gi : g) gi = rng.normal();
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += L[i * d + j] * g[j];
    x[i] = theta[i] + s;
  }
}

std::vector<double> draw_observation(const ShiftModel& model, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x;
  add_noise(model.covariance, model.theta, rng, x);
  return x;
}

SampleBatch draw_batch(const SequenceModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t d = cfg.theta.size();
  SampleBatch batch;
  batch.observations.resize(cfg.sample_count);
  batch.mean.assign(d, 0.0);
  for (std::size_t j = 0; j < cfg.sample_count; ++j) {
    add_noise(cfg.base_covariance, cfg.theta, rng, batch.observations[j]);
    for (std::size_t i = 0; i < d; ++i) batch.mean[i] += batch.observations[j][i];
  }
  for (auto& m : batch.mean) m /= static_cast<double>(cfg.sample_count);
  return batch;
}

}  // namespace fdb
