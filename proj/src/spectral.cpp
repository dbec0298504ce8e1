#include "fdb/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fdb {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 decimation-in-time FFT, in place. sign = -1 forward.
void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// O(M^2) fallback for even non-power-of-two lengths.
std::vector<std::complex<double>> dft_naive(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> s(0.0, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      const double ang = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(m) /
                         static_cast<double>(n);
      s += x[m] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = s;
  }
  return out;
}

}  // namespace

GridFunction1D::GridFunction1D(double lo, double hi, std::vector<double> values)
    : a(lo), b(hi), samples(std::move(values)) {
  if (!(a < b)) throw std::invalid_argument("grid function: need a < b");
  if (samples.size() < 2 || samples.size() % 2 != 0)
    throw std::invalid_argument("grid function: sample count must be even and >= 2");
  for (double v : samples)
    if (!std::isfinite(v)) throw std::invalid_argument("grid function: samples must be finite");
}

Spectrum1D::Spectrum1D(double a, double b, std::vector<std::complex<double>> coeffs,
                       bool real_function)
    : a_(a), b_(b), coeffs_(std::move(coeffs)), real_function_(real_function) {
  if (!(a_ < b_)) throw std::invalid_argument("spectrum: need a < b");
  if (coeffs_.size() < 2 || coeffs_.size() % 2 != 0)
    throw std::invalid_argument("spectrum: coefficient count must be even and >= 2");
}

double Spectrum1D::base_frequency() const { return 2.0 * kPi / (b_ - a_); }

double Spectrum1D::frequency(long k) const { return static_cast<double>(k) * base_frequency(); }

std::complex<double> Spectrum1D::coefficient(long k) const {
  const long m = static_cast<long>(coeffs_.size());
  if (k < -m / 2 + 1 || k > m / 2) throw std::out_of_range("spectrum: index outside -M/2+1..M/2");
  return coeffs_[static_cast<std::size_t>(k >= 0 ? k : m + k)];
}

void Spectrum1D::set_coefficient(long k, std::complex<double> v) {
  const long m = static_cast<long>(coeffs_.size());
  if (k < -m / 2 + 1 || k > m / 2) throw std::out_of_range("spectrum: index outside -M/2+1..M/2");
  coeffs_[static_cast<std::size_t>(k >= 0 ? k : m + k)] = v;
}

Spectrum1D Spectrum1D::differentiate() const {
  std::vector<std::complex<double>> out(coeffs_.size());
  const long m = static_cast<long>(coeffs_.size());
  for (long k = -m / 2 + 1; k <= m / 2; ++k) {
    const std::size_t slot = static_cast<std::size_t>(k >= 0 ? k : m + k);
    out[slot] = std::complex<double>(0.0, frequency(k)) * coeffs_[slot];
  }
  // The Nyquist mode pairs with no conjugate partner; its derivative has no
  // real-valued representation on this grid, so it is dropped.
  out[static_cast<std::size_t>(m / 2)] = 0.0;
  return Spectrum1D(a_, b_, std::move(out), real_function_);
}

Spectrum1D analyze(const GridFunction1D& fn) {
  const std::size_t m = fn.size();
  std::vector<std::complex<double>> c;
  if (is_power_of_two(m)) {
    c.assign(fn.samples.begin(), fn.samples.end());
    fft_radix2(c, -1);
  } else {
    c = dft_naive(fn.samples);
  }
  for (auto& ck : c) ck /= static_cast<double>(m);
  return Spectrum1D(fn.a, fn.b, std::move(c), true);
}

double synthesize_at(const Spectrum1D& spec, double x) {
  if (!spec.represents_real())
    throw std::invalid_argument("synthesize_at: spectrum not flagged as a real function");
  const long half = spec.max_index();
  const double phase = spec.base_frequency() * (x - spec.a());
  const std::complex<double> u(std::cos(phase), std::sin(phase));
  // k = 0, then conjugate pairs 2*Re(c_k u^k), Nyquist handled once.
  double out = spec.coefficient(0).real();
  std::complex<double> p(1.0, 0.0);
  for (long k = 1; k < half; ++k) {
    p *= u;
    out += 2.0 * (spec.coefficient(k) * p).real();
  }
  p *= u;
  out += (spec.coefficient(half) * p).real();
  return out;
}

Spectrum1D hard_truncate(const Spectrum1D& spec, long K) {
  if (K < 0 || K > spec.max_index())
    throw std::out_of_range("hard_truncate: cutoff outside 0..M/2");
  Spectrum1D out = spec;
  for (long k = -spec.max_index() + 1; k <= spec.max_index(); ++k)
    if (std::labs(k) > K) out.set_coefficient(k, 0.0);
  return out;
}

GridFunction1D mirror_extend(const GridFunction1D& fn, std::optional<double> value_at_b) {
  const std::size_t m = fn.size();
  std::vector<double> out(2 * m);
  for (std::size_t i = 0; i < m; ++i) out[i] = fn.samples[i];
  // Even reflection about x = b. The sample at b itself is not on the input
  // grid; use the supplied analytic value or repeat the nearest sample.
  out[m] = value_at_b.value_or(fn.samples[m - 1]);
  for (std::size_t i = m + 1; i < 2 * m; ++i) out[i] = fn.samples[2 * m - i];
  return GridFunction1D(fn.a, fn.b + (fn.b - fn.a), std::move(out));
}

namespace {

// C-infinity step: 0 at u<=0, 1 at u>=1.
double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double e0 = std::exp(-1.0 / u);
  const double e1 = std::exp(-1.0 / (1.0 - u));
  return e0 / (e0 + e1);
}

// chi(t): 1 on t<=1, 0 on t>=2, smooth monotone in between.
double chi(double t) { return t <= 1.0 ? 1.0 : (t >= 2.0 ? 0.0 : smooth_step(2.0 - t)); }

}  // namespace

DyadicPartition::DyadicPartition(int levels) : levels_(levels) {
  if (levels < 0) throw std::invalid_argument("dyadic partition: levels must be >= 0");
}

double DyadicPartition::weight(int j, double zeta) const {
  if (j < 0) throw std::invalid_argument("dyadic partition: j must be >= 0");
  const double az = std::abs(zeta);
  if (j == 0) return chi(az);
  // phi_j = chi(|z|/2^j) - chi(|z|/2^{j-1}); supports telescope so the sum
  // over levels collapses to chi(|z|/2^J).
  return chi(az / std::ldexp(1.0, j)) - chi(az / std::ldexp(1.0, j - 1));
}

double DyadicPartition::cumulative(int N, double zeta) const {
  if (N < 0) return 0.0;
  return chi(std::abs(zeta) / std::ldexp(1.0, N));
}

Spectrum1D lp_truncate(const Spectrum1D& spec, int N, const DyadicPartition& partition) {
  if (N < 0) throw std::invalid_argument("lp_truncate: N must be >= 0");
  Spectrum1D out = spec;
  for (long k = -spec.max_index() + 1; k <= spec.max_index(); ++k)
    out.set_coefficient(k, spec.coefficient(k) * partition.cumulative(N, spec.frequency(k)));
  return out;
}

}  // namespace fdb
