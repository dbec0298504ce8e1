#include "fdb/estimator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fdb/errors.hpp"

namespace fdb {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

BaseFunction BaseFunction::power275() { return BaseFunction(Kind::Power275); }
BaseFunction BaseFunction::power375() { return BaseFunction(Kind::Power375); }
BaseFunction BaseFunction::cosine() { return BaseFunction(Kind::Cosine); }
BaseFunction BaseFunction::linear() { return BaseFunction(Kind::Linear); }

BaseFunction BaseFunction::from_grid(GridFunction1D samples) {
  BaseFunction f(Kind::Grid);
  f.grid_ = std::move(samples);
  return f;
}

double BaseFunction::domain_lo() const { return kind_ == Kind::Grid ? grid_.a : 0.0; }
double BaseFunction::domain_hi() const { return kind_ == Kind::Grid ? grid_.b : 1.0; }

const Spectrum1D& BaseFunction::grid_spectrum() const {
  if (!spec_) spec_ = analyze(grid_);
  return *spec_;
}

const Spectrum1D& BaseFunction::grid_derivative() const {
  if (!dspec_) dspec_ = grid_spectrum().differentiate();
  return *dspec_;
}

double BaseFunction::value(double x) const {
  switch (kind_) {
    case Kind::Power275:
      return std::pow(2.0 * x, 2.75);
    case Kind::Power375:
      return std::pow(2.0 * x, 3.75);
    case Kind::Cosine:
      return std::cos(kTwoPi * x);
    case Kind::Linear:
      return x;
    case Kind::Grid:
      return synthesize_at(grid_spectrum(), x);
  }
  return 0.0;
}

double BaseFunction::derivative(double x) const {
  switch (kind_) {
    case Kind::Power275:
      return 2.0 * 2.75 * std::pow(2.0 * x, 1.75);
    case Kind::Power375:
      return 2.0 * 3.75 * std::pow(2.0 * x, 2.75);
    case Kind::Cosine:
      return -kTwoPi * std::sin(kTwoPi * x);
    case Kind::Linear:
      return 1.0;
    case Kind::Grid:
      return synthesize_at(grid_derivative(), x);
  }
  return 0.0;
}

GridFunction1D BaseFunction::sample(std::size_t M) const {
  if (kind_ == Kind::Grid && M == grid_.size()) return grid_;
  const double lo = domain_lo(), hi = domain_hi();
  std::vector<double> v(M);
  for (std::size_t m = 0; m < M; ++m)
    v[m] = value(lo + (hi - lo) * static_cast<double>(m) / static_cast<double>(M));
  return GridFunction1D(lo, hi, std::move(v));
}

ProductFunction::ProductFunction(BaseFunction h, std::size_t d, double b)
    : base(std::move(h)), dim(d), beta(b) {
  if (dim < 1) throw std::invalid_argument("product function: dimension must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("product function: normalizer must be positive");
}

DebiasedEvaluator1D::DebiasedEvaluator1D(double a, double b,
                                         std::vector<std::complex<double>> weights)
    : a_(a), b_(b), weights_(std::move(weights)) {
  if (!(a_ < b_)) throw std::invalid_argument("evaluator: need a < b");
  if (weights_.empty()) throw std::invalid_argument("evaluator: no retained modes");
  for (const auto& w : weights_)
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw std::invalid_argument("evaluator: weights must be finite");
}

double DebiasedEvaluator1D::base_frequency() const { return kTwoPi / (b_ - a_); }

double DebiasedEvaluator1D::evaluate(double x) const {
  const double phase = base_frequency() * (x - a_);
  const std::complex<double> u(std::cos(phase), std::sin(phase));
  double out = weights_[0].real();
  std::complex<double> p(1.0, 0.0);
  for (std::size_t k = 1; k < weights_.size(); ++k) {
    p *= u;
    out += 2.0 * (weights_[k] * p).real();
  }
  return out;
}

DebiasedEvaluator1D build_debiased_1d(const Spectrum1D& spec, double noise_variance,
                                      const TruncationChoice& cutoff, double overflow_guard) {
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw std::invalid_argument("build_debiased_1d: noise variance must be positive");
  if (!spec.represents_real())
    throw std::invalid_argument("build_debiased_1d: spectrum must represent a real function");

  long kmax = 0;
  const long top = spec.max_index();
  if (cutoff.mode == TruncationChoice::Mode::Hard) {
    if (cutoff.hard_k < 0 || cutoff.hard_k > top)
      throw std::out_of_range("build_debiased_1d: hard cutoff outside 0..M/2");
    kmax = cutoff.hard_k;
  } else {
    // Retained support of the smooth truncation: |zeta| < 2^{N+1}.
    const double zmax = std::ldexp(1.0, cutoff.dyadic_n + 1);
    kmax = static_cast<long>(std::floor(zmax / spec.base_frequency()));
    if (kmax > top) kmax = top;
  }

  const DyadicPartition partition(cutoff.mode == TruncationChoice::Mode::Dyadic
                                      ? std::max(cutoff.dyadic_n + 1, 1)
                                      : 1);
  std::vector<std::complex<double>> w(static_cast<std::size_t>(kmax) + 1);
  for (long k = 0; k <= kmax; ++k) {
    std::complex<double> c = spec.coefficient(k);
    if (cutoff.mode == TruncationChoice::Mode::Dyadic)
      c *= partition.cumulative(cutoff.dyadic_n, spec.frequency(k));
    if (c == std::complex<double>(0.0, 0.0)) continue;  // outside the support
    const double zeta = spec.frequency(k);
    const double exponent = noise_variance * zeta * zeta / 2.0;
    if (exponent > overflow_guard) {
      std::ostringstream msg;
      msg << "debiasing multiplier overflow at mode k=" << k << " (exponent " << exponent
          << " > guard " << overflow_guard << "): cutoff too aggressive for this noise level";
      throw OverflowGuardError(msg.str(), k);
    }
    w[static_cast<std::size_t>(k)] = c * std::exp(exponent);
  }
  // A Nyquist mode has no conjugate partner; halve it so paired evaluation
  // counts it exactly once.
  if (kmax == top) w.back() *= 0.5;
  return DebiasedEvaluator1D(spec.a(), spec.b(), std::move(w));
}

double eval_product(const DebiasedEvaluator1D& ev, double beta, const std::vector<double>& x,
                    std::size_t* fold_count) {
  const double period = ev.b() - ev.a();
  double out = beta;
  for (double xi : x) {
    double y = xi;
    if (y < ev.a() || y >= ev.b()) {
      y = std::fmod(y - ev.a(), period);
      if (y < 0.0) y += period;
      y += ev.a();
      if (fold_count) ++*fold_count;
    }
    out *= ev.evaluate(y);
  }
  return out;
}

TensorEvaluator::TensorEvaluator(std::vector<double> lo, std::vector<std::vector<double>> freqs,
                                 std::vector<std::complex<double>> weights)
    : lo_(std::move(lo)), freqs_(std::move(freqs)), weights_(std::move(weights)) {
  if (freqs_.size() != weights_.size())
    throw std::invalid_argument("tensor evaluator: frequency/weight count mismatch");
}

double TensorEvaluator::evaluate(const std::vector<double>& x) const {
  if (x.size() != dim()) throw std::invalid_argument("tensor evaluator: dimension mismatch");
  double out = 0.0;
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    double dot = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) dot += freqs_[m][i] * (x[i] - lo_[i]);
    out += weights_[m].real() * std::cos(dot) - weights_[m].imag() * std::sin(dot);
  }
  return out;
}

double TensorEvaluator::weight_curvature_sum() const {
  double out = 0.0;
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    double z2 = 0.0;
    for (double f : freqs_[m]) z2 += f * f;
    out += std::abs(weights_[m]) * z2;
  }
  return out;
}

namespace {

// Shared enumeration core: coefficient_at produces the d-dim coefficient for
// a multi-index; modes with coefficient exactly zero are outside the support.
template <class CoefFn>
TensorEvaluator enumerate_tensor(const std::vector<double>& lo,
                                 const std::vector<double>& base_freq,
                                 const std::vector<long>& kmax, const Covariance& cov,
                                 CoefFn&& coefficient_at) {
  const std::size_t d = lo.size();
  double count = 1.0;
  for (long k : kmax) count *= static_cast<double>(2 * k + 1);
  if (count > static_cast<double>(kTensorRetainedCap))
    throw ConfigError("tensor path infeasible; use separable path");

  std::vector<long> idx(d, 0);
  for (std::size_t i = 0; i < d; ++i) idx[i] = -kmax[i];
  std::vector<std::vector<double>> freqs;
  std::vector<std::complex<double>> weights;
  std::vector<double> zeta(d);

  bool done = false;
  while (!done) {
    const std::complex<double> c = coefficient_at(idx);
    if (c != std::complex<double>(0.0, 0.0)) {
      for (std::size_t i = 0; i < d; ++i) zeta[i] = static_cast<double>(idx[i]) * base_freq[i];
      const double exponent = cov.quad_form(zeta) / 2.0;
      if (exponent > kOverflowGuard) {
        std::ostringstream msg;
        msg << "debiasing multiplier overflow at a retained tensor mode (exponent " << exponent
            << " > guard " << kOverflowGuard << "): cutoff too aggressive for this noise level";
        throw OverflowGuardError(msg.str(), idx[0]);
      }
      freqs.push_back(zeta);
      weights.push_back(c * std::exp(exponent));
    }
    // odometer increment over the box [-K_i, K_i]^d
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (idx[axis] < kmax[axis]) {
        ++idx[axis];
        break;
      }
      idx[axis] = -kmax[axis];
      if (axis == 0) done = true;
    }
  }
  return TensorEvaluator(lo, std::move(freqs), std::move(weights));
}

}  // namespace

TensorEvaluator build_tensor_evaluator(const std::vector<Spectrum1D>& axes, const Covariance& cov,
                                       const std::vector<long>& cutoff_per_axis) {
  const std::size_t d = axes.size();
  if (d == 0 || cov.dim() != d || cutoff_per_axis.size() != d)
    throw std::invalid_argument("tensor evaluator: axis/covariance dimension mismatch");
  std::vector<double> lo(d), bf(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (cutoff_per_axis[i] < 0 || cutoff_per_axis[i] > axes[i].max_index())
      throw std::out_of_range("tensor evaluator: cutoff outside 0..M/2");
    lo[i] = axes[i].a();
    bf[i] = axes[i].base_frequency();
  }
  return enumerate_tensor(lo, bf, cutoff_per_axis, cov, [&](const std::vector<long>& idx) {
    std::complex<double> c(1.0, 0.0);
    for (std::size_t i = 0; i < d; ++i) c *= axes[i].coefficient(idx[i]);
    return c;
  });
}

TensorEvaluator build_tensor_evaluator(const TensorGrid& grid, const Covariance& cov,
                                       const std::vector<long>& cutoff_per_axis) {
  const std::size_t d = grid.sizes.size();
  if (d == 0 || grid.lo.size() != d || grid.hi.size() != d || cutoff_per_axis.size() != d ||
      cov.dim() != d)
    throw std::invalid_argument("tensor evaluator: grid description inconsistent");
  std::size_t total = 1;
  for (std::size_t m : grid.sizes) {
    if (m < 2 || m % 2 != 0)
      throw std::invalid_argument("tensor evaluator: axis sizes must be even and >= 2");
    total *= m;
  }
  if (grid.samples.size() != total)
    throw std::invalid_argument("tensor evaluator: sample count mismatch");

  // Full multi-dimensional transform: run the 1-D transform along each axis
  // in turn (row-major layout, last axis fastest).
  std::vector<std::complex<double>> data(grid.samples.begin(), grid.samples.end());
  std::vector<std::complex<double>> line;
  std::size_t stride = 1;
  for (std::size_t axis = d; axis-- > 0;) {
    const std::size_t m = grid.sizes[axis];
    const std::size_t blocks = total / (m * stride);
    line.resize(m);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = blk * m * stride + off;
        for (std::size_t t = 0; t < m; ++t) line[t] = data[start + t * stride];
        // naive 1-D DFT; grids on the tensor path are small by contract
        std::vector<std::complex<double>> out(m, {0.0, 0.0});
        for (std::size_t k = 0; k < m; ++k) {
          std::complex<double> s(0.0, 0.0);
          for (std::size_t t = 0; t < m; ++t) {
            const double ang =
                -kTwoPi * static_cast<double>(k * t % m) / static_cast<double>(m);
            s += line[t] * std::complex<double>(std::cos(ang), std::sin(ang));
          }
          out[k] = s;
        }
        for (std::size_t t = 0; t < m; ++t) data[start + t * stride] = out[t];
      }
    }
    stride *= m;
  }
  for (auto& c : data) c /= static_cast<double>(total);

  std::vector<double> bf(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (cutoff_per_axis[i] < 0 || 2 * cutoff_per_axis[i] > static_cast<long>(grid.sizes[i]))
      throw std::out_of_range("tensor evaluator: cutoff outside 0..M/2");
    bf[i] = kTwoPi / (grid.hi[i] - grid.lo[i]);
  }
  // row-major slot of a signed multi-index
  auto slot_of = [&](const std::vector<long>& idx) {
    std::size_t slot = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const long m = static_cast<long>(grid.sizes[i]);
      const long k = idx[i] >= 0 ? idx[i] : m + idx[i];
      slot = slot * grid.sizes[i] + static_cast<std::size_t>(k);
    }
    return slot;
  };
  return enumerate_tensor(grid.lo, bf, cutoff_per_axis, cov,
                          [&](const std::vector<long>& idx) { return data[slot_of(idx)]; });
}

double plug_in(const ProductFunction& f, const std::vector<double>& x) {
  if (x.size() != f.dim) throw std::invalid_argument("plug_in: dimension mismatch");
  double out = f.beta;
  for (double xi : x) out *= f.base.value(xi);
  return out;
}

double sensitivity_sigma(const ProductFunction& f, const std::vector<double>& theta,
                         const Covariance& cov) {
  const std::size_t d = f.dim;
  if (theta.size() != d || cov.dim() != d)
    throw std::invalid_argument("sensitivity_sigma: dimension mismatch");
  // grad_j = beta * h'(theta_j) * prod_{i != j} h(theta_i), built from
  // prefix/suffix products so single zeros of h stay harmless.
  std::vector<double> h(d), prefix(d + 1, 1.0), suffix(d + 1, 1.0);
  for (std::size_t i = 0; i < d; ++i) h[i] = f.base.value(theta[i]);
  for (std::size_t i = 0; i < d; ++i) prefix[i + 1] = prefix[i] * h[i];
  for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] * h[i];
  std::vector<double> grad(d);
  for (std::size_t j = 0; j < d; ++j)
    grad[j] = f.beta * f.base.derivative(theta[j]) * prefix[j] * suffix[j + 1];
  return std::sqrt(cov.quad_form(grad));
}

double hessian_bound_proxy(const DebiasedEvaluator1D& ev) {
  const double bf = ev.base_frequency();
  double out = 0.0;
  const auto& w = ev.weights();
  for (std::size_t k = 1; k < w.size(); ++k) {
    const double zeta = bf * static_cast<double>(k);
    out += 2.0 * std::abs(w[k]) * zeta * zeta;  // +/- pair
  }
  return out;
}

double hessian_bound_proxy(const TensorEvaluator& ev) { return ev.weight_curvature_sum(); }

}  // namespace fdb
