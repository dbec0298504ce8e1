#pragma once

#include <cstddef>
#include <vector>

namespace fdb {

// Symmetric positive definite noise covariance. Three storage forms:
// scalar*identity, diagonal, dense row-major. Immutable after construction.
class Covariance {
 public:
  enum class Form { ScalarIdentity, Diagonal, Dense };

  static Covariance scalar_identity(std::size_t d, double variance);
  static Covariance diagonal(std::vector<double> variances);
  // Row-major d*d symmetric matrix; symmetry validated to 1e-12 relative.
  static Covariance dense(std::size_t d, std::vector<double> entries);

  Form form() const { return form_; }
  std::size_t dim() const { return dim_; }
  bool is_diagonal() const { return form_ != Form::Dense; }

  double at(std::size_t i, std::size_t j) const;
  double diag_at(std::size_t i) const { return at(i, i); }

  double trace() const;
  // Largest eigenvalue. Exact for scalar/diagonal forms; power iteration to
  // 1e-10 relative tolerance (10^4 iteration cap) for dense form. A negative
  // Rayleigh quotient along the way means the matrix is not PSD: error.
  double operator_norm() const;
  double effective_rank() const;  // trace / operator_norm

  // <Sigma z, z> for z of length dim().
  double quad_form(const std::vector<double>& z) const;

  // Lower Cholesky factor (row-major), used for correlated sampling.
  // Fails if the matrix is not positive definite.
  const std::vector<double>& cholesky() const;

 private:
  Covariance() = default;

  Form form_ = Form::ScalarIdentity;
  std::size_t dim_ = 0;
  double scalar_ = 0.0;             // ScalarIdentity
  std::vector<double> diag_;        // Diagonal
  std::vector<double> entries_;     // Dense, row-major
  mutable std::vector<double> chol_;  // lazy; guarded single-threaded use at setup
};

// Unrounded truncation level (log2(1/op_norm) - log2(erank) - 2) / 2.
// Exposed separately because the adaptive cutoff is compared against it.
double cutoff_level_value(double op_norm, double erank);

// Ceiling of cutoff_level_value, clamped below at zero. Throws when
// op_norm * erank >= 1: no nontrivial truncation exists and the caller
// should fall back to the zero estimator.
int cutoff_level(const Covariance& cov);
int cutoff_level(double op_norm, double erank);

}  // namespace fdb
