#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace fdb {

// A function sampled on [a, b): M equispaced values at a + m(b-a)/M.
// M must be even (symmetric frequency indexing k = -M/2+1 .. M/2).
struct GridFunction1D {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> samples;

  GridFunction1D() = default;
  GridFunction1D(double lo, double hi, std::vector<double> values);

  std::size_t size() const { return samples.size(); }
  double node(std::size_t m) const {
    return a + (b - a) * static_cast<double>(m) / static_cast<double>(size());
  }
};

// Trigonometric coefficients of a sampled function. Index k runs over
// -M/2+1 .. M/2; coefficient k sits at frequency zeta_k = k * 2*pi/(b-a).
// Stored in FFT layout: slot k for k = 0..M/2, slot M+k for negative k.
class Spectrum1D {
 public:
  Spectrum1D(double a, double b, std::vector<std::complex<double>> coeffs, bool real_function);

  double a() const { return a_; }
  double b() const { return b_; }
  std::size_t transform_size() const { return coeffs_.size(); }
  long max_index() const { return static_cast<long>(coeffs_.size() / 2); }
  bool represents_real() const { return real_function_; }

  double base_frequency() const;                   // 2*pi/(b-a)
  double frequency(long k) const;                  // k * base_frequency
  std::complex<double> coefficient(long k) const;  // k in -M/2+1 .. M/2
  void set_coefficient(long k, std::complex<double> v);

  // d/dx in the frequency domain: multiply coefficient k by i*zeta_k.
  // The Nyquist mode is dropped (its derivative has no real representation).
  Spectrum1D differentiate() const;

 private:
  double a_, b_;
  std::vector<std::complex<double>> coeffs_;
  bool real_function_;
};

// Forward transform, normalized so that synthesize_at reproduces the samples:
// c_k = (1/M) * sum_m samples[m] * e^{-i zeta_k (x_m - a)}.
Spectrum1D analyze(const GridFunction1D& fn);

// Re sum_k c_k e^{i zeta_k (x - a)}. Requires the real-function flag.
double synthesize_at(const Spectrum1D& spec, double x);

// Zero out all |k| > K. K <= M/2.
Spectrum1D hard_truncate(const Spectrum1D& spec, long K);

// Even reflection about b: [a,b] -> [a, 2b-a], samples mirrored. Removes the
// wrap jump of a non-periodic function (the image is continuous, kink only),
// which is what keeps deconvolution weights bounded at usable cutoffs.
// value_at_b supplies the sample at the reflection point, which is not a
// node of the input grid; when absent the nearest sample is repeated.
GridFunction1D mirror_extend(const GridFunction1D& fn,
                             std::optional<double> value_at_b = std::nullopt);

// Smooth dyadic resolution of unity. Level j = 0 covers |zeta| <= 2,
// level j >= 1 covers 2^{j-1} <= |zeta| <= 2^{j+1}; sum over j is 1.
class DyadicPartition {
 public:
  explicit DyadicPartition(int levels);  // j = 0..levels

  int levels() const { return levels_; }
  double weight(int j, double zeta) const;       // phi_j(zeta)
  double cumulative(int N, double zeta) const;   // sum_{j<=N} phi_j(zeta)

 private:
  int levels_;
};

// Littlewood-Paley truncation: coefficient at zeta_k scaled by
// sum_{j<=N} phi_j(|zeta_k|). Identity on |zeta| <= 2^N, zero beyond 2^{N+1}.
Spectrum1D lp_truncate(const Spectrum1D& spec, int N, const DyadicPartition& partition);

}  // namespace fdb
