#pragma once

// Reference implementations used only by the tests. Everything here is
// written independently of the library internals (different algorithms,
// long-double accumulation) so agreement is meaningful.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

// Cyclic Jacobi eigenvalue iteration for a symmetric matrix, row-major.
// Returns eigenvalues sorted descending. O(d^3) per sweep; plenty for the
// small matrices in the tests.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t d) {
  if (a.size() != d * d) throw std::invalid_argument("eigenvalues: size mismatch");
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * d + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(d);
  for (std::size_t i = 0; i < d; ++i) ev[i] = at(i, i);
  for (std::size_t i = 0; i < d; ++i)  // selection sort, descending
    for (std::size_t j = i + 1; j < d; ++j)
      if (ev[j] > ev[i]) std::swap(ev[i], ev[j]);
  return ev;
}

// Direct O(M^2) forward DFT with the same normalization the library
// advertises: c_k = (1/M) sum_m s_m e^{-2 pi i k m / M}, k = 0..M-1.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& s) {
  const std::size_t m = s.size();
  std::vector<std::complex<double>> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t j = 0; j < m; ++j) {
      const long double ang = -2.0L * std::numbers::pi_v<long double> *
                              static_cast<long double>(k) * static_cast<long double>(j) /
                              static_cast<long double>(m);
      re += s[j] * std::cos(ang);
      im += s[j] * std::sin(ang);
    }
    out[k] = {static_cast<double>(re / m), static_cast<double>(im / m)};
  }
  return out;
}

// Trigonometric-polynomial value at an arbitrary point from FFT-layout
// coefficients: Re sum_{k=-M/2+1}^{M/2} c_k e^{i k w (x-a)}, w = 2 pi/(b-a).
inline double naive_synthesis(const std::vector<std::complex<double>>& c, double a, double b,
                              double x) {
  const long m = static_cast<long>(c.size());
  const double w = 2.0 * std::numbers::pi / (b - a);
  long double acc = 0.0L;
  for (long k = -m / 2 + 1; k <= m / 2; ++k) {
    const std::complex<double> ck = c[static_cast<std::size_t>(k >= 0 ? k : m + k)];
    const double ang = w * static_cast<double>(k) * (x - a);
    acc += ck.real() * std::cos(ang) - ck.imag() * std::sin(ang);
  }
  return static_cast<double>(acc);
}

// Composite Simpson on a fixed fine grid (even interval count).
inline double simpson(const std::vector<double>& f, double lo, double hi) {
  const std::size_t n = f.size() - 1;
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("simpson: need even interval count");
  long double s = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) s += f[i] * (i % 2 ? 4.0L : 2.0L);
  return static_cast<double>(s * (hi - lo) / (3.0L * n));
}

template <typename F>
double simpson_fn(F&& fn, double lo, double hi, std::size_t intervals = 4096) {
  std::vector<double> f(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    f[i] = fn(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(intervals));
  return simpson(f, lo, hi);
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // population variance
};

// Two-pass long-double mean / population variance.
inline Moments moments(const std::vector<double>& v) {
  long double m = 0.0L;
  for (double x : v) m += x;
  m /= static_cast<long double>(v.size());
  long double s2 = 0.0L;
  for (double x : v) {
    const long double dev = x - m;
    s2 += dev * dev;
  }
  return {static_cast<double>(m), static_cast<double>(s2 / static_cast<long double>(v.size()))};
}

// Ordinary least squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ls_slope: bad input");
  long double mx = 0.0L, my = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<long double>(x.size());
  my /= static_cast<long double>(x.size());
  long double sxx = 0.0L, sxy = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return static_cast<double>(sxy / sxx);
}

}  // namespace oracle
