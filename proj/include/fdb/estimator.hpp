#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fdb/covariance.hpp"
#include "fdb/spectral.hpp"

namespace fdb {

// One-dimensional base function h. The built-in kinds carry analytic values
// and derivatives; Grid bases are defined by their samples and fall back to
// trigonometric interpolation / spectral differentiation.
class BaseFunction {
 public:
  enum class Kind { Power275, Power375, Cosine, Linear, Grid };

  static BaseFunction power275();  // (2x)^2.75 on [0,1]
  static BaseFunction power375();  // (2x)^3.75 on [0,1]
  static BaseFunction cosine();    // cos(2*pi*x) on [0,1]
  static BaseFunction linear();    // x on [0,1]
  static BaseFunction from_grid(GridFunction1D samples);

  Kind kind() const { return kind_; }
  double domain_lo() const;
  double domain_hi() const;
  bool periodic() const { return kind_ == Kind::Cosine; }

  double value(double x) const;
  double derivative(double x) const;

  // Equispaced samples on the base's own domain.
  GridFunction1D sample(std::size_t M) const;

 private:
  explicit BaseFunction(Kind k) : kind_(k) {}
  const Spectrum1D& grid_spectrum() const;
  const Spectrum1D& grid_derivative() const;

  Kind kind_;
  GridFunction1D grid_;                      // Kind::Grid
  mutable std::optional<Spectrum1D> spec_;   // lazy interpolant for Grid
  mutable std::optional<Spectrum1D> dspec_;  // lazy spectral derivative for Grid
};

// f(theta) = beta * prod_j h(theta_j).
struct ProductFunction {
  BaseFunction base;
  std::size_t dim;
  double beta;

  ProductFunction(BaseFunction h, std::size_t d, double b);
};

struct TruncationChoice {
  enum class Mode { Hard, Dyadic };
  Mode mode = Mode::Hard;
  long hard_k = 0;   // Mode::Hard
  int dyadic_n = 0;  // Mode::Dyadic

  static TruncationChoice hard(long K) { return {Mode::Hard, K, 0}; }
  static TruncationChoice dyadic(int N) { return {Mode::Dyadic, 0, N}; }
};

// Retained frequencies with coefficients premultiplied by the inverse of the
// Gaussian damping: w_k = c_k * e^{v zeta_k^2 / 2}. Evaluating
//   g(x) = Re sum_k w_k e^{i zeta_k (x-a)}
// then gives E[g(theta + xi)] = (truncated f)(theta) for per-axis noise
// variance v: each mode's damping E e^{i zeta xi} = e^{-v zeta^2/2} is
// cancelled exactly.
class DebiasedEvaluator1D {
 public:
  // weights index k = 0..K in FFT half-layout (negative modes implied by
  // conjugate symmetry); nyquist term excluded by construction (K < M/2
  // enforced upstream for mirror grids, harmless otherwise).
  DebiasedEvaluator1D(double a, double b, std::vector<std::complex<double>> weights);

  double a() const { return a_; }
  double b() const { return b_; }
  long max_index() const { return static_cast<long>(weights_.size()) - 1; }
  const std::vector<std::complex<double>>& weights() const { return weights_; }
  double base_frequency() const;

  double evaluate(double x) const;

 private:
  double a_, b_;
  std::vector<std::complex<double>> weights_;
};

inline constexpr double kOverflowGuard = 700.0;  // natural-log units

// Truncate the spectrum, then multiply each retained coefficient by
// e^{v zeta^2/2}. Throws OverflowGuardError (with the offending index) if an
// exponent for a retained nonzero coefficient exceeds the guard.
DebiasedEvaluator1D build_debiased_1d(const Spectrum1D& spec, double noise_variance,
                                      const TruncationChoice& cutoff,
                                      double overflow_guard = kOverflowGuard);

// beta * prod_j evaluator(x_j): the separable estimator for product f and
// diagonal covariance. Points outside [a,b) are folded periodically (the
// evaluator is a trigonometric polynomial); fold_count, when given, counts
// how many coordinates needed folding so callers can log the event.
double eval_product(const DebiasedEvaluator1D& ev, double beta, const std::vector<double>& x,
                    std::size_t* fold_count = nullptr);

// General small-d estimator: explicit list of retained multi-frequencies.
class TensorEvaluator {
 public:
  TensorEvaluator(std::vector<double> lo, std::vector<std::vector<double>> freqs,
                  std::vector<std::complex<double>> weights);

  std::size_t dim() const { return lo_.size(); }
  std::size_t retained_count() const { return weights_.size(); }

  double evaluate(const std::vector<double>& x) const;
  // sum |w| * ||zeta||^2 over retained modes (see hessian_bound_proxy).
  double weight_curvature_sum() const;

 private:
  std::vector<double> lo_;
  std::vector<std::vector<double>> freqs_;
  std::vector<std::complex<double>> weights_;
};

// Multi-dimensional sampled function on a product grid, row-major samples
// (last axis fastest).
struct TensorGrid {
  std::vector<double> lo, hi;
  std::vector<std::size_t> sizes;
  std::vector<double> samples;
};

inline constexpr std::size_t kTensorRetainedCap = 10'000'000;

// Product-function route: per-axis spectra; the d-dim coefficient at
// multi-index (k_1..k_d) is the product of axis coefficients.
TensorEvaluator build_tensor_evaluator(const std::vector<Spectrum1D>& axes, const Covariance& cov,
                                       const std::vector<long>& cutoff_per_axis);
// General route: full multi-dimensional transform of the sampled grid.
TensorEvaluator build_tensor_evaluator(const TensorGrid& grid, const Covariance& cov,
                                       const std::vector<long>& cutoff_per_axis);

// f evaluated directly from the analytic base (grid bases: trigonometric
// interpolant). The baseline the debiased estimator is compared against.
double plug_in(const ProductFunction& f, const std::vector<double>& x);

// sqrt(<Sigma grad f(theta), grad f(theta)>).
double sensitivity_sigma(const ProductFunction& f, const std::vector<double>& theta,
                         const Covariance& cov);

// Upper bound on sup_x ||Hessian of g||_op: sum over retained frequencies of
// |weight| * ||zeta||^2 (triangle inequality on the second derivative of the
// trigonometric sum; +/- mode pairs both counted).
double hessian_bound_proxy(const DebiasedEvaluator1D& ev);
double hessian_bound_proxy(const TensorEvaluator& ev);

}  // namespace fdb
