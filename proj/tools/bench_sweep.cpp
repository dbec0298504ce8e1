// Times one sweep row on the OpenMP worker pool against the serial reference
// path and checks that both produce bit-identical statistics. The trial
// streams are keyed by (seed, row, trial) and results are slot-addressed, so
// any mismatch here is a real determinism bug, not scheduling noise.

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "fdb/experiments.hpp"
#include "fdb/parallel.hpp"
#include "fdb/report.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> row_fields(const fdb::SimulationRow& r) {
  return {r.alpha,      static_cast<double>(r.d),
          r.threshold,  r.plugin_bias,
          r.tf_bias,    r.adaptive_bias,
          r.plugin_var, r.tf_var,
          r.adaptive_var, r.plugin_mse,
          r.tf_mse,     r.adaptive_mse,
          r.plugin_se,  r.tf_se,
          r.adaptive_se, r.ref_half,
          r.ref_full,   r.ref_sqrt_n,
          r.ref_inv_n};
}

bool bit_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;  // NaN-tolerant comparison
}

}  // namespace

int main(int argc, char** argv) {
  fdb::SimulationConfig cfg;
  cfg.alpha_grid = {0.6};
  cfg.trials = 400;

  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&](const char* what) -> std::string {
      if (i + 1 >= argc) {
        std::cerr << what << " needs a value\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--trials")
      cfg.trials = std::stoull(next("--trials"));
    else if (arg == "--alpha")
      cfg.alpha_grid = {std::stod(next("--alpha"))};
    else if (arg == "--n")
      cfg.n = std::stoull(next("--n"));
    else if (arg == "--adaptive")
      cfg.adaptive = true;
    else if (arg == "--seed")
      cfg.seed = std::stoull(next("--seed"));
    else {
      std::cerr << "usage: bench_sweep [--trials N] [--alpha A] [--n N] [--seed S] [--adaptive]\n";
      return 2;
    }
  }

  std::cout << "alpha " << cfg.alpha_grid[0] << ", trials " << cfg.trials << ", n " << cfg.n
            << (cfg.adaptive ? ", adaptive" : "") << "\n";

  cfg.serial = true;
  auto t0 = std::chrono::steady_clock::now();
  const auto serial_rows = fdb::run_sweep(cfg);
  const double serial_s = seconds_since(t0);

  cfg.serial = false;
  t0 = std::chrono::steady_clock::now();
  const auto parallel_rows = fdb::run_sweep(cfg);
  const double parallel_s = seconds_since(t0);

  bool match = serial_rows.size() == parallel_rows.size();
  for (std::size_t r = 0; match && r < serial_rows.size(); ++r) {
    const auto a = row_fields(serial_rows[r]);
    const auto b = row_fields(parallel_rows[r]);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!bit_equal(a[i], b[i])) {
        match = false;
        std::cerr << "mismatch in row " << r << " field " << i << ": "
                  << fdb::format_g17(a[i]) << " vs " << fdb::format_g17(b[i]) << "\n";
      }
  }

  std::cout << "serial:   " << serial_s << " s\n";
  std::cout << "parallel: " << parallel_s << " s (" << fdb::thread_budget() << " workers)\n";
  if (parallel_s > 0.0) std::cout << "speedup:  " << serial_s / parallel_s << "x\n";
  std::cout << "bit-identical: " << (match ? "yes" : "NO") << "\n";
  return match ? 0 : 1;
}
