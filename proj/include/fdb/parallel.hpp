#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fdb {

// Worker count: OpenMP's default, optionally capped by FOURIER_DEBIAS_THREADS.
// Returns 1 when built without OpenMP.
inline int thread_budget() {
#ifdef _OPENMP
  int budget = omp_get_max_threads();
#else
  int budget = 1;
#endif
  if (const char* env = std::getenv("FOURIER_DEBIAS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && cap < budget) budget = static_cast<int>(cap);
  }
  return budget < 1 ? 1 : budget;
}

// Runs fn(i) for i in [0, count). Callers must write results into
// slots addressed by i; combined with per-index RNG streams this makes every
// aggregate independent of scheduling. force_serial selects the reference
// path used by tests and the benchmark.
template <class F>
void parallel_for(std::size_t count, F&& fn, bool force_serial = false) {
  if (force_serial || thread_budget() == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_budget())
  for (std::int64_t i = 0; i < n; ++i) fn(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < count; ++i) fn(i);
#endif
}

// Deterministic pairwise reduction; result is a fixed function of the slot
// values alone, never of thread timing. Straight summation below 32 elements.
inline double pairwise_sum(const double* a, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

inline double pairwise_mean(const std::vector<double>& a) {
  return a.empty() ? 0.0 : pairwise_sum(a.data(), a.size()) / static_cast<double>(a.size());
}

}  // namespace fdb
