#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fdb/experiments.hpp"

namespace fdb {

// Every emitted file starts with one comment line carrying the tool version,
// the subcommand, and the fully resolved configuration, so a run can be
// reproduced from its outputs alone. Deliberately no wall-clock field:
// reruns must be byte-identical.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> config;  // resolved, in order

  void set(const std::string& key, const std::string& value);
  std::string line() const;  // "# fourier-debias <version> <subcommand> k=v ..."
};

extern const char* const kToolVersion;

std::string format_g17(double v);  // 17 significant digits, C locale

void write_sweep_csv(const std::string& path, const RunManifest& manifest,
                     const std::vector<SimulationRow>& rows);
void write_adaptive_diff_csv(const std::string& path, const RunManifest& manifest,
                             const std::vector<AdaptiveDiffRow>& rows);
void write_lower_bound_csv(const std::string& path, const RunManifest& manifest,
                           const LowerBoundResult& result, const LowerBoundConfig& cfg);
void write_normal_check_csv(const std::string& path, const RunManifest& manifest,
                            const NormalCheckReport& report);

// Log-log charts of the sweep: bias.svg, variance.svg, mse.svg. One solid
// polyline per estimator, dashed reference curves, decade ticks.
void write_sweep_svgs(const std::string& out_dir, const RunManifest& manifest,
                      const std::vector<SimulationRow>& rows, bool adaptive_enabled,
                      std::size_t n);

// Flat "key = value" configuration file; '#' starts a comment. Unknown keys
// are the caller's problem (the CLI rejects them with exit code 2).
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace fdb
