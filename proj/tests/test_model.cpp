#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "fdb/model.hpp"
#include "fdb/parallel.hpp"
#include "fdb/rng.hpp"
#include "oracles.hpp"

using fdb::Covariance;

TEST_CASE("rng: deterministic per seed, distinct across derived streams") {
  fdb::Rng a(123), b(123), c(124);
  bool identical = true, differs = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    identical = identical && (va == b.next_u64());
    differs = differs || (va != c.next_u64());
  }
  CHECK(identical);
  CHECK(differs);

  const auto s1 = fdb::derive_stream(1, 5, 7);
  const auto s2 = fdb::derive_stream(1, 5, 8);
  const auto s3 = fdb::derive_stream(1, 6, 7);
  CHECK(s1 != s2);
  CHECK(s1 != s3);
  CHECK(s2 != s3);
  CHECK(fdb::derive_stream(1, 5, 7) == s1);
}

TEST_CASE("rng: uniform01 range and normal moments") {
  fdb::Rng rng(777);
  const std::size_t N = 200000;
  long double su = 0.0L, sn = 0.0L, sn2 = 0.0L;
  for (std::size_t i = 0; i < N; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  const double Nd = static_cast<double>(N);
  // 4-sigma Monte Carlo gates: se(mean U) = 1/sqrt(12 N), se(mean Z) = 1/sqrt(N),
  // se(mean Z^2) = sqrt(2/N)
  CHECK(std::abs(static_cast<double>(su) / Nd - 0.5) < 4.0 / std::sqrt(12.0 * Nd));
  CHECK(std::abs(static_cast<double>(sn) / Nd) < 4.0 / std::sqrt(Nd));
  CHECK(std::abs(static_cast<double>(sn2) / Nd - 1.0) < 4.0 * std::sqrt(2.0 / Nd));
}

TEST_CASE("pairwise summation matches a long-double reference") {
  fdb::Rng rng(9);
  std::vector<double> v(10001);
  long double ref = 0.0L;
  for (auto& x : v) {
    x = rng.uniform(-1.0, 1.0) * 1e6;
    ref += x;
  }
  CHECK(fdb::pairwise_sum(v.data(), v.size()) ==
        doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  CHECK(fdb::pairwise_mean(v) ==
        doctest::Approx(static_cast<double>(ref) / 10001.0).epsilon(1e-12));
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<int> hits(1000, 0);
  fdb::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("shift model: dimension validation and the zero-noise limit") {
  CHECK_THROWS_AS(fdb::ShiftModel({0.5, 0.5}, Covariance::scalar_identity(3, 1.0)),
                  std::invalid_argument);

  const fdb::ShiftModel model({0.3, 0.7, 0.5}, Covariance::scalar_identity(3, 1e-30));
  const auto x = fdb::draw_observation(model, 99);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(x[i] - model.theta[i]) <= 1e-10);
}

TEST_CASE("draw_observation is reproducible per seed") {
  const fdb::ShiftModel model({0.1, 0.9}, Covariance::diagonal({0.5, 2.0}));
  CHECK(fdb::draw_observation(model, 5) == fdb::draw_observation(model, 5));
  CHECK(fdb::draw_observation(model, 5) != fdb::draw_observation(model, 6));
}

TEST_CASE("dense-covariance draws reproduce mean and covariance (MC, 4 se)") {
  // correlated 3x3 with off-diagonal mass
  const std::vector<double> S = {1.0, 0.6, 0.2, 0.6, 2.0, -0.4, 0.2, -0.4, 1.5};
  const fdb::ShiftModel model({1.0, -2.0, 0.5}, Covariance::dense(3, S));

  const std::size_t N = 100000;
  std::vector<std::vector<double>> draws(N);
  fdb::Rng rng(2024);
  for (std::size_t t = 0; t < N; ++t) {
    fdb::add_noise(model.covariance, model.theta, rng, draws[t]);
  }
  const double Nd = static_cast<double>(N);

  for (std::size_t i = 0; i < 3; ++i) {
    long double m = 0.0L;
    for (const auto& x : draws) m += x[i];
    const double mean_i = static_cast<double>(m / N);
    const double se = std::sqrt(S[i * 3 + i] / Nd);
    CHECK(std::abs(mean_i - model.theta[i]) < 4.0 * se);
  }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      long double c = 0.0L;
      for (const auto& x : draws)
        c += (x[i] - model.theta[i]) * (x[j] - model.theta[j]);
      const double cov_ij = static_cast<double>(c / N);
      // var of the sample cross-moment of a bivariate Gaussian
      const double se =
          std::sqrt((S[i * 3 + i] * S[j * 3 + j] + S[i * 3 + j] * S[i * 3 + j]) / Nd);
      CHECK(std::abs(cov_ij - S[i * 3 + j]) < 4.0 * se);
    }
}

TEST_CASE("draw_batch: mean field, reproducibility, zero-noise collapse") {
  const fdb::SequenceModelConfig cfg({0.4, 0.6}, Covariance::scalar_identity(2, 1.0), 50);
  const auto batch = fdb::draw_batch(cfg, 31);
  CHECK(batch.size() == 50);
  CHECK(batch.dim() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    long double s = 0.0L;
    for (const auto& obs : batch.observations) s += obs[i];
    CHECK(batch.mean[i] == doctest::Approx(static_cast<double>(s / 50.0L)).epsilon(1e-14));
  }

  const auto again = fdb::draw_batch(cfg, 31);
  CHECK(batch.mean == again.mean);
  CHECK(batch.observations == again.observations);

  CHECK_THROWS_AS(fdb::SequenceModelConfig({0.4}, Covariance::scalar_identity(1, 1.0), 1),
                  std::invalid_argument);

  const fdb::SequenceModelConfig quiet({0.25, 0.75}, Covariance::scalar_identity(2, 1e-30), 2);
  const auto qb = fdb::draw_batch(quiet, 3);
  CHECK(std::abs(qb.mean[0] - 0.25) <= 1e-10);
  CHECK(std::abs(qb.mean[1] - 0.75) <= 1e-10);
}

TEST_CASE("batch means carry covariance Sigma0 / n (MC, 4 se)") {
  const std::size_t n = 20, trials = 20000;
  const fdb::SequenceModelConfig cfg({0.0, 0.0}, Covariance::diagonal({1.0, 2.0}), n);

  std::vector<double> m0(trials), m1(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto b = fdb::draw_batch(cfg, 1000 + t);
    m0[t] = b.mean[0];
    m1[t] = b.mean[1];
  }
  const auto mom0 = oracle::moments(m0);
  const auto mom1 = oracle::moments(m1);
  const double Td = static_cast<double>(trials);

  // mean of x_bar converges to theta at rate sqrt(Sigma0_ii / (n * trials))
  CHECK(std::abs(mom0.mean) < 4.0 * std::sqrt(1.0 / (n * Td)));
  CHECK(std::abs(mom1.mean) < 4.0 * std::sqrt(2.0 / (n * Td)));
  // var of x_bar is Sigma0_ii / n; se of a sample variance ~ var * sqrt(2/T)
  CHECK(std::abs(mom0.var - 1.0 / n) < 4.0 * (1.0 / n) * std::sqrt(2.0 / Td));
  CHECK(std::abs(mom1.var - 2.0 / n) < 4.0 * (2.0 / n) * std::sqrt(2.0 / Td));
}
