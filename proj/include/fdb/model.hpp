#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fdb/covariance.hpp"
#include "fdb/rng.hpp"

namespace fdb {

// Shift model: one observation x = theta + xi, xi ~ N(0, Sigma).
struct ShiftModel {
  std::vector<double> theta;
  Covariance covariance;

  ShiftModel(std::vector<double> t, Covariance c);
};

// Repeated-observation model: x_j = theta + z_j, z_j ~ N(0, Sigma0),
// j = 1..n. The sample mean carries covariance Sigma0 / n.
struct SequenceModelConfig {
  std::vector<double> theta;
  Covariance base_covariance;  // Sigma0
  std::size_t sample_count;    // n >= 2

  SequenceModelConfig(std::vector<double> t, Covariance c, std::size_t n);
};

struct SampleBatch {
  std::vector<std::vector<double>> observations;  // n vectors of length d
  std::vector<double> mean;

  std::size_t size() const { return observations.size(); }
  std::size_t dim() const { return mean.size(); }
};

// theta + Sigma^{1/2} * standard normal vector. Deterministic per seed.
std::vector<double> draw_observation(const ShiftModel& model, std::uint64_t seed);

// In-place variant for hot loops: writes theta + noise into x.
void add_noise(const Covariance& cov, const std::vector<double>& theta, Rng& rng,
               std::vector<double>& x);

SampleBatch draw_batch(const SequenceModelConfig& cfg, std::uint64_t seed);

}  // namespace fdb
