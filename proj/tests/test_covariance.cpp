#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "fdb/covariance.hpp"
#include "fdb/rng.hpp"
#include "oracles.hpp"

using fdb::Covariance;

namespace {

// Random symmetric PSD matrix A A^T / d + ridge, row-major.
std::vector<double> random_psd(std::size_t d, fdb::Rng& rng, double ridge = 0.1) {
  std::vector<double> a(d * d);
  for (auto& v : a) v = rng.uniform(-1.0, 1.0);
  std::vector<double> m(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[i * d + k] * a[j * d + k];
      m[i * d + j] = s / static_cast<double>(d);
    }
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] += ridge;
  return m;
}

}  // namespace

TEST_CASE("covariance constructors validate their input") {
  CHECK_THROWS_AS(Covariance::scalar_identity(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Covariance::scalar_identity(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Covariance::scalar_identity(3, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Covariance::diagonal({}), std::invalid_argument);
  CHECK_THROWS_AS(Covariance::diagonal({1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Covariance::dense(2, {1.0, 0.0, 0.0}), std::invalid_argument);
  // asymmetry beyond the 1e-12 relative gate
  CHECK_THROWS_AS(Covariance::dense(2, {1.0, 0.5, 0.4, 1.0}), std::invalid_argument);
}

TEST_CASE("entry access agrees across storage forms") {
  const auto s = Covariance::scalar_identity(3, 2.5);
  const auto di = Covariance::diagonal({2.5, 2.5, 2.5});
  const auto de = Covariance::dense(3, {2.5, 0, 0, 0, 2.5, 0, 0, 0, 2.5});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(s.at(i, j) == di.at(i, j));
      CHECK(s.at(i, j) == de.at(i, j));
    }
  CHECK(s.diag_at(1) == 2.5);
  CHECK(s.is_diagonal());
  CHECK(di.is_diagonal());
  CHECK(!de.is_diagonal());
}

TEST_CASE("operator norm: closed forms and a dense eigenvalue oracle") {
  CHECK(Covariance::scalar_identity(5, 1.0).operator_norm() == 1.0);
  CHECK(Covariance::diagonal({2.0, 1.0, 1.0}).operator_norm() == 2.0);

  fdb::Rng rng(42);
  for (int rep = 0; rep < 5; ++rep) {
    const auto m = random_psd(6, rng);
    const auto cov = Covariance::dense(6, m);
    const auto ev = oracle::symmetric_eigenvalues(m, 6);
    CHECK(cov.operator_norm() == doctest::Approx(ev.front()).epsilon(1e-9));
  }
}

TEST_CASE("operator norm rejects a matrix with a negative direction") {
  const auto bad = Covariance::dense(2, {-1.0, 0.0, 0.0, -2.0});
  CHECK_THROWS_AS(bad.operator_norm(), std::invalid_argument);
}

TEST_CASE("trace: scalar identity in d = 100") {
  const auto cov = Covariance::scalar_identity(100, 0.01);
  CHECK(cov.trace() == doctest::Approx(1.0).epsilon(1e-15));

  fdb::Rng rng(7);
  const auto m = random_psd(6, rng);
  double diag_sum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) diag_sum += m[i * 6 + i];
  CHECK(Covariance::dense(6, m).trace() == doctest::Approx(diag_sum).epsilon(1e-15));
}

TEST_CASE("effective rank: closed forms, oracle, and range invariant") {
  CHECK(Covariance::scalar_identity(100, 0.01).effective_rank() ==
        doctest::Approx(100.0).epsilon(1e-12));
  CHECK(Covariance::diagonal({1.0, 0.5, 0.5}).effective_rank() ==
        doctest::Approx(2.0).epsilon(1e-12));

  fdb::Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    const auto m = random_psd(6, rng);
    const auto cov = Covariance::dense(6, m);
    const auto ev = oracle::symmetric_eigenvalues(m, 6);
    double tr = 0.0;
    for (double e : ev) tr += e;
    CHECK(cov.effective_rank() == doctest::Approx(tr / ev.front()).epsilon(1e-9));
    // 1 <= r <= d, with r = d only when all eigenvalues are equal
    CHECK(cov.effective_rank() >= 1.0);
    CHECK(cov.effective_rank() < 6.0);
  }
  CHECK(Covariance::scalar_identity(6, 3.0).effective_rank() ==
        doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("quadratic form matches a direct triple loop") {
  fdb::Rng rng(3);
  const auto m = random_psd(5, rng);
  const auto cov = Covariance::dense(5, m);
  std::vector<double> z(5);
  for (auto& v : z) v = rng.uniform(-2.0, 2.0);

  double direct = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) direct += z[i] * m[i * 5 + j] * z[j];
  CHECK(cov.quad_form(z) == doctest::Approx(direct).epsilon(1e-13));

  const auto diag = Covariance::diagonal({1.0, 2.0, 3.0, 4.0, 5.0});
  double dd = 0.0;
  for (std::size_t i = 0; i < 5; ++i) dd += diag.diag_at(i) * z[i] * z[i];
  CHECK(diag.quad_form(z) == doctest::Approx(dd).epsilon(1e-14));
  CHECK_THROWS_AS(diag.quad_form({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("cholesky factor reconstructs the matrix; non-PD input is rejected") {
  fdb::Rng rng(19);
  const auto m = random_psd(6, rng);
  const auto cov = Covariance::dense(6, m);
  const auto& L = cov.cholesky();
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 6; ++k) s += L[i * 6 + k] * L[j * 6 + k];
      CHECK(s == doctest::Approx(m[i * 6 + j]).epsilon(1e-12));
      if (j > i) CHECK(L[i * 6 + j] == 0.0);
    }

  // eigenvalues 3 and -1: symmetric but not positive definite
  const auto bad = Covariance::dense(2, {1.0, 2.0, 2.0, 1.0});
  CHECK_THROWS_AS(bad.cholesky(), std::invalid_argument);
}

TEST_CASE("cutoff level: worked examples and the frozen unrounded values") {
  CHECK(fdb::cutoff_level(1e-4, 100.0) == 3);
  CHECK(fdb::cutoff_level(1e-4, 1.0) == 6);
  CHECK(fdb::cutoff_level(0.25, 1.0) == 0);

  CHECK(fdb::cutoff_level_value(1e-4, 100.0) ==
        doctest::Approx(2.3219280948873626).epsilon(1e-12));
  CHECK(fdb::cutoff_level_value(1e-4, 1.0) ==
        doctest::Approx(5.6438561897747245).epsilon(1e-12));
  CHECK(fdb::cutoff_level_value(0.25, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  const auto cov = Covariance::scalar_identity(100, 1e-4);
  CHECK(fdb::cutoff_level(cov) == 3);
}

TEST_CASE("cutoff level: no budget left when op_norm * erank >= 1") {
  CHECK_THROWS_AS(fdb::cutoff_level(0.5, 2.0), std::domain_error);
  CHECK_THROWS_AS(fdb::cutoff_level(0.1, 20.0), std::domain_error);
  CHECK_THROWS_AS(fdb::cutoff_level(2.0, 1.0), std::domain_error);
}

TEST_CASE("cutoff level is non-increasing in noise size and effective rank") {
  const std::vector<double> ops = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  for (double er : {1.0, 4.0, 32.0}) {
    int prev = 1 << 20;
    for (double op : ops) {
      if (op * er >= 1.0) break;
      const int lvl = fdb::cutoff_level(op, er);
      CHECK(lvl <= prev);
      prev = lvl;
    }
  }
  for (double op : {1e-6, 1e-4}) {
    int prev = 1 << 20;
    for (double er : {1.0, 2.0, 8.0, 64.0, 512.0}) {
      if (op * er >= 1.0) break;
      const int lvl = fdb::cutoff_level(op, er);
      CHECK(lvl <= prev);
      prev = lvl;
    }
  }
}
