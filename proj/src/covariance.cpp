#include "fdb/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdb/rng.hpp"

namespace fdb {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Covariance Covariance::scalar_identity(std::size_t d, double variance) {
  require(d >= 1, "covariance: dimension must be positive");
  require(std::isfinite(variance) && variance > 0.0, "covariance: variance must be positive");
  Covariance c;
  c.form_ = Form::ScalarIdentity;
  c.dim_ = d;
  c.scalar_ = variance;
  return c;
}

Covariance Covariance::diagonal(std::vector<double> variances) {
  require(!variances.empty(), "covariance: dimension must be positive");
  for (double v : variances)
    require(std::isfinite(v) && v > 0.0, "covariance: diagonal entries must be positive");
  Covariance c;
  c.form_ = Form::Diagonal;
  c.dim_ = variances.size();
  c.diag_ = std::move(variances);
  return c;
}

Covariance Covariance::dense(std::size_t d, std::vector<double> entries) {
  require(d >= 1, "covariance: dimension must be positive");
  require(entries.size() == d * d, "covariance: dense entries must be d*d");
  double scale = 0.0;
  for (double v : entries) {
    require(std::isfinite(v), "covariance: entries must be finite");
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      require(std::abs(entries[i * d + j] - entries[j * d + i]) <= 1e-12 * std::max(1.0, scale),
              "covariance: matrix is not symmetric");
  Covariance c;
  c.form_ = Form::Dense;
  c.dim_ = d;
  c.entries_ = std::move(entries);
  return c;
}

double Covariance::at(std::size_t i, std::size_t j) const {
  switch (form_) {
    case Form::ScalarIdentity:
      return i == j ? scalar_ : 0.0;
    case Form::Diagonal:
      return i == j ? diag_[i] : 0.0;
    case Form::Dense:
      return entries_[i * dim_ + j];
  }
  return 0.0;
}

double Covariance::trace() const {
  switch (form_) {
    case Form::ScalarIdentity:
      return scalar_ * static_cast<double>(dim_);
    case Form::Diagonal: {
      double t = 0.0;
      for (double v : diag_) t += v;
      return t;
    }
    case Form::Dense: {
      double t = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) t += entries_[i * dim_ + i];
      return t;
    }
  }
  return 0.0;
}

double Covariance::operator_norm() const {
  if (form_ == Form::ScalarIdentity) return scalar_;
  if (form_ == Form::Diagonal) return *std::max_element(diag_.begin(), diag_.end());

  // Power iteration with a fixed pseudo-random start vector; only the
  // leading eigenvalue is needed, so eigenvalue ties are harmless.
  const std::size_t d = dim_;
  Rng rng(0x5eedULL);
  std::vector<double> v(d), w(d);
  double norm2 = 0.0;
  for (auto& vi : v) {
    vi = rng.uniform01() + 0.5;
    norm2 += vi * vi;
  }
  for (auto& vi : v) vi /= std::sqrt(norm2);

  double lambda = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += entries_[i * d + j] * v[j];
      w[i] = s;
    }
    double rayleigh = 0.0, wnorm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      rayleigh += v[i] * w[i];
      wnorm2 += w[i] * w[i];
    }
    if (rayleigh < 0.0)
      throw std::invalid_argument("covariance: negative Rayleigh quotient; matrix is not PSD");
    if (wnorm2 == 0.0) return 0.0;  // v in the kernel: PSD but degenerate
    const double wnorm = std::sqrt(wnorm2);
    for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / wnorm;
    if (std::abs(wnorm - lambda) <= 1e-10 * std::max(1.0, wnorm) && iter > 0) return wnorm;
    lambda = wnorm;
  }
  return lambda;
}

double Covariance::effective_rank() const { return trace() / operator_norm(); }

double Covariance::quad_form(const std::vector<double>& z) const {
  require(z.size() == dim_, "covariance: quad_form dimension mismatch");
  switch (form_) {
    case Form::ScalarIdentity: {
      double s = 0.0;
      for (double zi : z) s += zi * zi;
      return scalar_ * s;
    }
    case Form::Diagonal: {
      double s = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) s += diag_[i] * z[i] * z[i];
      return s;
    }
    case Form::Dense: {
      double s = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) row += entries_[i * dim_ + j] * z[j];
        s += z[i] * row;
      }
      return s;
    }
  }
  return 0.0;
}

const std::vector<double>& Covariance::cholesky() const {
  if (!chol_.empty()) return chol_;
  const std::size_t d = dim_;
  std::vector<double> L(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = at(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L[i * d + k] * L[j * d + k];
      if (i == j) {
        if (s <= 0.0)
          throw std::invalid_argument("covariance: not positive definite (Cholesky pivot <= 0)");
        L[i * d + i] = std::sqrt(s);
      } else {
        L[i * d + j] = s / L[j * d + j];
      }
    }
  }
  chol_ = std::move(L);
  return chol_;
}

double cutoff_level_value(double op_norm, double erank) {
  return (std::log2(1.0 / op_norm) - std::log2(erank) - 2.0) / 2.0;
}

int cutoff_level(double op_norm, double erank) {
  if (op_norm * erank >= 1.0)
    throw std::domain_error(
        "cutoff_level: noise too large for nontrivial truncation (op_norm * erank >= 1); "
        "fall back to the zero estimator");
  const double level = cutoff_level_value(op_norm, erank);
  if (level <= 0.0) return 0;
  return static_cast<int>(std::ceil(level));
}

int cutoff_level(const Covariance& cov) {
  const double op = cov.operator_norm();
  return cutoff_level(op, cov.trace() / op);
}

}  // namespace fdb
