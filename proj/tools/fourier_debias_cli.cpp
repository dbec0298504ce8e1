// Command-line front end: simulate / estimate / lower-bound / normal-check.
// All numeric output is locale-independent; every emitted file starts with a
// manifest comment so a run can be reproduced from its outputs alone.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "fdb/adaptive.hpp"
#include "fdb/covariance.hpp"
#include "fdb/errors.hpp"
#include "fdb/estimator.hpp"
#include "fdb/experiments.hpp"
#include "fdb/model.hpp"
#include "fdb/report.hpp"
#include "fdb/spectral.hpp"

namespace {

using fdb::ConfigError;

std::string trim_copy(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": not a number: '" + s + "'");
  }
}

long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": not an integer: '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": not an unsigned integer: '" + s + "'");
  }
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(what + ": not a boolean: '" + s + "'");
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string tok =
        trim_copy(s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (tok.empty()) throw ConfigError(what + ": empty element in list '" + s + "'");
    out.push_back(parse_double(tok, what));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

// Config file support: "key = value" lines applied to any option the command
// line did not set. Unknown keys are rejected.
struct ConfigBinder {
  struct Entry {
    CLI::Option* opt = nullptr;
    std::function<void(const std::string&)> set;
  };
  std::map<std::string, Entry> entries;

  void bind(const std::string& key, CLI::Option* opt,
            std::function<void(const std::string&)> set) {
    entries[key] = Entry{opt, std::move(set)};
  }
  void apply(const std::string& path) const {
    const auto values = fdb::parse_config_file(path);
    for (const auto& kv : values) {
      const auto it = entries.find(kv.first);
      if (it == entries.end()) throw ConfigError("unknown config key: " + kv.first);
      if (it->second.opt != nullptr && it->second.opt->count() > 0) continue;
      it->second.set(kv.second);
    }
  }
};

fdb::GridFunction1D load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file: " + path);
  std::string word;
  if (!(in >> word) || word != "domain")
    throw ConfigError("grid file " + path + ": first line must be 'domain a b'");
  double a = 0.0, b = 0.0;
  if (!(in >> a >> b)) throw ConfigError("grid file " + path + ": bad domain line");
  std::vector<double> samples;
  double v = 0.0;
  while (in >> v) samples.push_back(v);
  if (samples.size() < 2) throw ConfigError("grid file " + path + ": need at least 2 samples");
  try {
    return fdb::GridFunction1D(a, b, std::move(samples));
  } catch (const std::exception& e) {
    throw ConfigError("grid file " + path + ": " + e.what());
  }
}

fdb::BaseFunction parse_base(const std::string& s) {
  if (s == "h1") return fdb::BaseFunction::power275();
  if (s == "h2") return fdb::BaseFunction::power375();
  if (s == "cos") return fdb::BaseFunction::cosine();
  if (s == "linear") return fdb::BaseFunction::linear();
  if (s.rfind("grid:", 0) == 0) return fdb::BaseFunction::from_grid(load_grid_file(s.substr(5)));
  throw ConfigError("unknown base function '" + s +
                    "' (expected h1, h2, cos, linear, or grid:<path>)");
}

fdb::SampleBatch load_batch_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open batch file: " + path);
  fdb::SampleBatch batch;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream row(line);
    std::vector<double> obs;
    double v = 0.0;
    while (row >> v) obs.push_back(v);
    if (obs.empty()) continue;
    if (!batch.observations.empty() && obs.size() != batch.observations.front().size())
      throw ConfigError("batch file " + path + ": inconsistent row widths");
    batch.observations.push_back(std::move(obs));
  }
  if (batch.observations.size() < 2)
    throw ConfigError("batch file " + path + ": need at least 2 observations");
  const std::size_t n = batch.observations.size();
  const std::size_t d = batch.observations.front().size();
  batch.mean.assign(d, 0.0);
  for (const auto& obs : batch.observations)
    for (std::size_t i = 0; i < d; ++i) batch.mean[i] += obs[i];
  for (auto& m : batch.mean) m /= static_cast<double>(n);
  return batch;
}

std::vector<double> load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open covariance file: " + path);
  std::vector<double> entries;
  double v = 0.0;
  while (in >> v) entries.push_back(v);
  return entries;
}

double fold_to(double x, double a, double b) {
  if (x >= a && x < b) return x;
  const double period = b - a;
  double y = std::fmod(x - a, period);
  if (y < 0.0) y += period;
  return a + y;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::uint64_t seed = 1;
  std::size_t trials = 2000, n = 10000, grid_m = 1024;
  long cutoff_k = 20;
  std::string base = "h1";
  std::string alphas;  // empty: default grid 0.40..0.85
  bool adaptive = false, adaptive_diff = false, fixed_theta = false;
  bool plot = false, data_only = false, no_mirror = false, serial = false;
  double smoothness = 2.75, f_target = 0.1;
  double theta_lo = 0.4, theta_hi = 0.6;
  std::string normalizer = "per-draw", truncation = "hard";
  std::string out = ".", config;
};

int run_simulate(const SimulateOpts& o) {
  fdb::SimulationConfig cfg;
  cfg.seed = o.seed;
  cfg.trials = o.trials;
  cfg.n = o.n;
  cfg.cutoff_k = o.cutoff_k;
  cfg.grid_m = o.grid_m;
  cfg.base = parse_base(o.base);
  if (!o.alphas.empty()) cfg.alpha_grid = parse_list(o.alphas, "--alphas");
  cfg.adaptive = o.adaptive || o.adaptive_diff;
  cfg.fixed_theta = o.fixed_theta;
  cfg.smoothness = o.smoothness;
  cfg.f_target = o.f_target;
  cfg.theta_lo = o.theta_lo;
  cfg.theta_hi = o.theta_hi;
  cfg.mirror = !o.no_mirror;
  cfg.serial = o.serial;
  if (o.normalizer == "per-draw")
    cfg.normalizer = fdb::NormalizerPolicy::PerDraw;
  else if (o.normalizer == "expectation")
    cfg.normalizer = fdb::NormalizerPolicy::Expectation;
  else
    throw ConfigError("--normalizer must be per-draw or expectation");
  if (o.truncation == "dyadic")
    cfg.dyadic = true;
  else if (o.truncation != "hard")
    throw ConfigError("--truncation must be hard or dyadic");

  fdb::RunManifest man;
  man.subcommand = "simulate";
  man.set("seed", std::to_string(cfg.seed));
  man.set("trials", std::to_string(cfg.trials));
  man.set("n", std::to_string(cfg.n));
  man.set("cutoff-k", std::to_string(cfg.cutoff_k));
  man.set("grid-m", std::to_string(cfg.grid_m));
  man.set("base", o.base);
  {
    std::string joined;
    for (std::size_t i = 0; i < cfg.alpha_grid.size(); ++i) {
      if (i) joined += ',';
      joined += fdb::format_g17(cfg.alpha_grid[i]);
    }
    man.set("alphas", joined);
  }
  man.set("adaptive", bool_str(cfg.adaptive));
  man.set("adaptive-diff", bool_str(o.adaptive_diff));
  man.set("fixed-theta", bool_str(cfg.fixed_theta));
  man.set("smoothness", fdb::format_g17(cfg.smoothness));
  man.set("f-target", fdb::format_g17(cfg.f_target));
  man.set("normalizer", o.normalizer);
  man.set("theta-lo", fdb::format_g17(cfg.theta_lo));
  man.set("theta-hi", fdb::format_g17(cfg.theta_hi));
  man.set("mirror", bool_str(cfg.mirror));
  man.set("truncation", o.truncation);

  std::filesystem::create_directories(o.out);
  const auto rows = fdb::run_sweep(cfg);
  const std::string csv_path = o.out + "/sweep.csv";
  fdb::write_sweep_csv(csv_path, man, rows);
  std::cout << "wrote " << csv_path << " (" << rows.size() << " rows)\n";

  if (o.adaptive_diff) {
    const auto diff_rows = fdb::run_adaptive_diff(cfg);
    const std::string diff_path = o.out + "/adaptive_diff.csv";
    fdb::write_adaptive_diff_csv(diff_path, man, diff_rows);
    std::cout << "wrote " << diff_path << " (" << diff_rows.size() << " rows)\n";
  }
  if (o.plot && !o.data_only) {
    fdb::write_sweep_svgs(o.out, man, rows, cfg.adaptive, cfg.n);
    std::cout << "wrote " << o.out << "/bias.svg, variance.svg, mse.svg\n";
  }
  return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateOpts {
  std::string x_csv, base = "h1", cov_diag, cov_file, batch, theta_csv;
  double sigma2 = 0.0, beta = 1.0;
  long cutoff_k = 20;
  std::size_t grid_m = 1024;
  bool adaptive = false, no_mirror = false;
  std::string truncation = "hard";
  std::string out = ".", config;
  // presence markers filled from CLI option counts
  bool has_sigma2 = false, has_x = false;
};

int run_estimate(const EstimateOpts& o) {
  if (o.adaptive && o.batch.empty())
    throw ConfigError("--adaptive needs --batch <file> with repeated observations");
  if (o.truncation != "hard" && o.truncation != "dyadic")
    throw ConfigError("--truncation must be hard or dyadic");
  const bool dyadic = o.truncation == "dyadic";
  const fdb::BaseFunction base = parse_base(o.base);
  const bool mirror = !o.no_mirror;

  std::optional<fdb::SampleBatch> batch;
  std::vector<double> x;
  if (!o.batch.empty()) {
    if (o.has_x) throw ConfigError("give either --x or --batch, not both");
    batch = load_batch_file(o.batch);
    x = batch->mean;
  } else if (o.has_x) {
    x = parse_list(o.x_csv, "--x");
  } else {
    throw ConfigError("need an observation: --x <csv> or --batch <file>");
  }
  const std::size_t d = x.size();

  const int cov_given = (o.has_sigma2 ? 1 : 0) + (o.cov_diag.empty() ? 0 : 1) +
                        (o.cov_file.empty() ? 0 : 1);
  if (cov_given != 1)
    throw ConfigError("exactly one of --sigma2, --cov-diag, --cov-file is required");
  const fdb::Covariance cov = [&] {
    if (o.has_sigma2) return fdb::Covariance::scalar_identity(d, o.sigma2);
    if (!o.cov_diag.empty()) {
      auto diag = parse_list(o.cov_diag, "--cov-diag");
      if (diag.size() != d)
        throw ConfigError("dimension mismatch: --cov-diag has " + std::to_string(diag.size()) +
                          " entries, observation has " + std::to_string(d));
      return fdb::Covariance::diagonal(std::move(diag));
    }
    auto entries = load_matrix_file(o.cov_file);
    if (entries.size() != d * d)
      throw ConfigError("dimension mismatch: covariance file has " +
                        std::to_string(entries.size()) + " entries, expected " +
                        std::to_string(d * d));
    return fdb::Covariance::dense(d, std::move(entries));
  }();

  const fdb::ProductFunction f(base, d, o.beta);
  fdb::GridFunction1D grid = base.sample(o.grid_m);
  if (mirror && !base.periodic()) grid = fdb::mirror_extend(grid, base.value(base.domain_hi()));
  const fdb::Spectrum1D spec = fdb::analyze(grid);

  // Truncation level of the supplied covariance; absent when the noise is too
  // large for any nontrivial frequency budget.
  std::optional<int> level;
  try {
    level = fdb::cutoff_level(cov);
  } catch (const std::domain_error& e) {
    if (dyadic) throw ConfigError(std::string(e.what()));
  }
  const fdb::TruncationChoice cut =
      dyadic ? fdb::TruncationChoice::dyadic(*level) : fdb::TruncationChoice::hard(o.cutoff_k);

  const double plugin_value = fdb::plug_in(f, x);
  double tf_value = 0.0, hessian = 0.0;
  if (cov.is_diagonal()) {
    double prod = f.beta;
    for (std::size_t c = 0; c < d; ++c) {
      const auto ev = fdb::build_debiased_1d(spec, cov.diag_at(c), cut);
      prod *= ev.evaluate(fold_to(x[c], ev.a(), ev.b()));
      hessian += fdb::hessian_bound_proxy(ev);
    }
    tf_value = prod;
  } else {
    if (dyadic)
      throw ConfigError("dyadic truncation is supported on the separable (diagonal) path only");
    const std::vector<fdb::Spectrum1D> axes(d, spec);
    const std::vector<long> ks(d, std::min<long>(o.cutoff_k, spec.max_index()));
    const fdb::TensorEvaluator tev = fdb::build_tensor_evaluator(axes, cov, ks);
    tf_value = f.beta * tev.evaluate(x);
    hessian = fdb::hessian_bound_proxy(tev);
  }

  std::optional<double> sigma_f;
  if (!o.theta_csv.empty()) {
    const auto theta = parse_list(o.theta_csv, "--theta");
    if (theta.size() != d)
      throw ConfigError("dimension mismatch: --theta has " + std::to_string(theta.size()) +
                        " entries, observation has " + std::to_string(d));
    sigma_f = fdb::sensitivity_sigma(f, theta, cov);
  }

  std::optional<fdb::AdaptiveReport> arep;
  if (o.adaptive) {
    if (batch->dim() != d) throw ConfigError("batch dimension mismatch");
    fdb::AdaptiveConfig acfg;
    acfg.cutoff_k = o.cutoff_k;
    acfg.reference_level =
        std::max(0.0, fdb::cutoff_level_value(cov.operator_norm(), cov.effective_rank()));
    acfg.dyadic = dyadic;
    acfg.grid_m = o.grid_m;
    acfg.mirror = mirror;
    arep = fdb::adaptive_estimate(*batch, f, acfg);
  }

  fdb::RunManifest man;
  man.subcommand = "estimate";
  man.set("base", o.base);
  man.set("beta", fdb::format_g17(o.beta));
  man.set("cutoff-k", std::to_string(o.cutoff_k));
  man.set("grid-m", std::to_string(o.grid_m));
  man.set("mirror", bool_str(mirror));
  man.set("truncation", o.truncation);
  man.set("d", std::to_string(d));

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("plug_in", fdb::format_g17(plugin_value));
  kv.emplace_back("tf", fdb::format_g17(tf_value));
  if (arep) kv.emplace_back("adaptive", fdb::format_g17(arep->value));
  if (level) {
    kv.emplace_back("level", std::to_string(*level));
    const long dyadic_max = static_cast<long>(
        std::floor(std::ldexp(1.0, *level + 1) / spec.base_frequency()));
    kv.emplace_back("dyadic_max_index", std::to_string(dyadic_max));
  }
  kv.emplace_back("cutoff_k", std::to_string(o.cutoff_k));
  kv.emplace_back("hessian_proxy", fdb::format_g17(hessian));
  if (sigma_f) kv.emplace_back("sigma_f", fdb::format_g17(*sigma_f));
  if (arep) {
    kv.emplace_back("n_hat", fdb::format_g17(arep->n_hat));
    kv.emplace_back("k_hat", std::to_string(arep->k_hat));
    kv.emplace_back("trace_hat", fdb::format_g17(arep->trace_hat));
  }

  for (const auto& p : kv) std::cout << p.first << ": " << p.second << '\n';

  std::filesystem::create_directories(o.out);
  std::ofstream csv(o.out + "/estimate.csv", std::ios::binary);
  if (!csv) throw ConfigError("cannot open output file: " + o.out + "/estimate.csv");
  csv << man.line() << '\n' << "quantity,value\n";
  for (const auto& p : kv) csv << p.first << ',' << p.second << '\n';
  return 0;
}

// ------------------------------------------------------------- lower-bound

struct LowerOpts {
  int d = 1;
  double sigma = 1.0, smoothness = 2.75;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  std::string out = ".", config;
};

int run_lower_bound(const LowerOpts& o) {
  fdb::LowerBoundConfig cfg;
  cfg.d = o.d;
  cfg.sigma = o.sigma;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.smoothness = o.smoothness;
  const fdb::LowerBoundResult res = fdb::bayes_risk_lower_bound(cfg);

  fdb::RunManifest man;
  man.subcommand = "lower-bound";
  man.set("d", std::to_string(cfg.d));
  man.set("sigma", fdb::format_g17(cfg.sigma));
  man.set("trials", std::to_string(cfg.trials));
  man.set("seed", std::to_string(cfg.seed));
  man.set("smoothness", fdb::format_g17(cfg.smoothness));

  std::cout << "eps: " << fdb::format_g17(res.eps) << '\n';
  std::cout << "ratio: " << fdb::format_g17(res.ratio) << '\n';
  std::cout << "mc_se: " << fdb::format_g17(res.mc_se) << '\n';
  std::cout << "reference: " << fdb::format_g17(res.reference) << '\n';
  std::cout << "risk_lower_bound: " << fdb::format_g17(res.risk_lower_bound) << '\n';

  std::filesystem::create_directories(o.out);
  fdb::write_lower_bound_csv(o.out + "/lower_bound.csv", man, res, cfg);
  return 0;
}

// ------------------------------------------------------------ normal-check

struct NormalOpts {
  std::string f = "cos";
  double theta = 0.3, sigma = 0.01, ks_threshold = 0.02;
  std::size_t trials = 10000, grid_m = 1024;
  long cutoff_k = 20;
  std::uint64_t seed = 1;
  std::string out = ".", config;
};

int run_normal_check(const NormalOpts& o) {
  fdb::NormalCheckConfig cfg;
  cfg.f = parse_base(o.f);
  cfg.theta = o.theta;
  cfg.sigma = o.sigma;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.cutoff_k = o.cutoff_k;
  cfg.grid_m = o.grid_m;
  const fdb::NormalCheckReport rep = fdb::normal_check(cfg);

  fdb::RunManifest man;
  man.subcommand = "normal-check";
  man.set("f", o.f);
  man.set("theta", fdb::format_g17(cfg.theta));
  man.set("sigma", fdb::format_g17(cfg.sigma));
  man.set("trials", std::to_string(cfg.trials));
  man.set("seed", std::to_string(cfg.seed));
  man.set("cutoff-k", std::to_string(cfg.cutoff_k));
  man.set("grid-m", std::to_string(cfg.grid_m));
  man.set("ks-threshold", fdb::format_g17(o.ks_threshold));

  std::cout << "ks: " << fdb::format_g17(rep.ks) << '\n';
  std::cout << "threshold: " << fdb::format_g17(o.ks_threshold) << '\n';
  std::cout << "result: " << (rep.ks <= o.ks_threshold ? "pass" : "fail") << '\n';
  std::cout << "sigma_f: " << fdb::format_g17(rep.sigma_f) << '\n';
  std::cout << "mean_std_error: " << fdb::format_g17(rep.mean_std_error) << '\n';
  std::cout << "k_ratio: " << fdb::format_g17(rep.k_ratio) << '\n';

  std::filesystem::create_directories(o.out);
  fdb::write_normal_check_csv(o.out + "/normal_check.csv", man, rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"debiased estimation of product functionals observed in Gaussian noise"};
  app.set_version_flag("--version", fdb::kToolVersion);
  app.require_subcommand(1);

  SimulateOpts so;
  EstimateOpts eo;
  LowerOpts lo;
  NormalOpts no_;
  ConfigBinder sim_bind, est_bind, low_bind, nc_bind;

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Monte Carlo sweep over the d = n^alpha grid");
  {
    auto& b = sim_bind;
    b.bind("seed", sim->add_option("--seed", so.seed, "RNG seed")->capture_default_str(),
           [&](const std::string& v) { so.seed = parse_u64(v, "seed"); });
    b.bind("trials",
           sim->add_option("--trials", so.trials, "Monte Carlo trials per row")
               ->capture_default_str(),
           [&](const std::string& v) { so.trials = parse_u64(v, "trials"); });
    b.bind("n",
           sim->add_option("--n", so.n, "sample count; noise variance is 1/n")
               ->capture_default_str(),
           [&](const std::string& v) { so.n = parse_u64(v, "n"); });
    b.bind("cutoff-k",
           sim->add_option("--cutoff-k", so.cutoff_k, "per-axis frequency cutoff")
               ->capture_default_str(),
           [&](const std::string& v) { so.cutoff_k = parse_int(v, "cutoff-k"); });
    b.bind("grid-m",
           sim->add_option("--grid-m", so.grid_m, "sampling grid size")->capture_default_str(),
           [&](const std::string& v) { so.grid_m = parse_u64(v, "grid-m"); });
    b.bind("base",
           sim->add_option("--base", so.base, "base function: h1|h2|cos|linear|grid:<path>")
               ->capture_default_str(),
           [&](const std::string& v) { so.base = v; });
    b.bind("alphas",
           sim->add_option("--alphas", so.alphas, "comma list of alpha values (default grid)"),
           [&](const std::string& v) { so.alphas = v; });
    b.bind("adaptive", sim->add_flag("--adaptive", so.adaptive, "run the unknown-covariance path"),
           [&](const std::string& v) { so.adaptive = parse_bool(v, "adaptive"); });
    b.bind("adaptive-diff",
           sim->add_flag("--adaptive-diff", so.adaptive_diff,
                         "also write the known-vs-adaptive difference study"),
           [&](const std::string& v) { so.adaptive_diff = parse_bool(v, "adaptive-diff"); });
    b.bind("fixed-theta",
           sim->add_flag("--fixed-theta", so.fixed_theta, "one theta per row, not per trial"),
           [&](const std::string& v) { so.fixed_theta = parse_bool(v, "fixed-theta"); });
    b.bind("plot", sim->add_flag("--plot", so.plot, "write bias/variance/mse SVG charts"),
           [&](const std::string& v) { so.plot = parse_bool(v, "plot"); });
    b.bind("data-only", sim->add_flag("--data-only", so.data_only, "suppress charts"),
           [&](const std::string& v) { so.data_only = parse_bool(v, "data-only"); });
    b.bind("smoothness",
           sim->add_option("--smoothness", so.smoothness, "s for reference lines")
               ->capture_default_str(),
           [&](const std::string& v) { so.smoothness = parse_double(v, "smoothness"); });
    b.bind("f-target",
           sim->add_option("--f-target", so.f_target, "normalized value of f(theta)")
               ->capture_default_str(),
           [&](const std::string& v) { so.f_target = parse_double(v, "f-target"); });
    b.bind("normalizer",
           sim->add_option("--normalizer", so.normalizer, "per-draw|expectation")
               ->capture_default_str(),
           [&](const std::string& v) { so.normalizer = v; });
    b.bind("theta-lo",
           sim->add_option("--theta-lo", so.theta_lo, "theta range lower end")
               ->capture_default_str(),
           [&](const std::string& v) { so.theta_lo = parse_double(v, "theta-lo"); });
    b.bind("theta-hi",
           sim->add_option("--theta-hi", so.theta_hi, "theta range upper end")
               ->capture_default_str(),
           [&](const std::string& v) { so.theta_hi = parse_double(v, "theta-hi"); });
    b.bind("no-mirror",
           sim->add_flag("--no-mirror", so.no_mirror, "periodize literally instead of mirroring"),
           [&](const std::string& v) { so.no_mirror = parse_bool(v, "no-mirror"); });
    b.bind("truncation",
           sim->add_option("--truncation", so.truncation, "hard|dyadic")->capture_default_str(),
           [&](const std::string& v) { so.truncation = v; });
    b.bind("serial", sim->add_flag("--serial", so.serial, "reference single-worker execution"),
           [&](const std::string& v) { so.serial = parse_bool(v, "serial"); });
    b.bind("out", sim->add_option("--out", so.out, "output directory")->capture_default_str(),
           [&](const std::string& v) { so.out = v; });
    sim->add_option("--config", so.config, "key = value config file (flags win)");
  }

  // estimate ---------------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "evaluate the estimators at one observation");
  CLI::Option* est_x = nullptr;
  CLI::Option* est_sigma2 = nullptr;
  {
    auto& b = est_bind;
    est_x = est->add_option("--x", eo.x_csv, "observation vector, comma separated");
    b.bind("x", est_x, [&](const std::string& v) {
      eo.x_csv = v;
      eo.has_x = true;
    });
    est_sigma2 = est->add_option("--sigma2", eo.sigma2, "scalar noise variance sigma^2");
    b.bind("sigma2", est_sigma2, [&](const std::string& v) {
      eo.sigma2 = parse_double(v, "sigma2");
      eo.has_sigma2 = true;
    });
    b.bind("cov-diag", est->add_option("--cov-diag", eo.cov_diag, "diagonal covariance, comma list"),
           [&](const std::string& v) { eo.cov_diag = v; });
    b.bind("cov-file",
           est->add_option("--cov-file", eo.cov_file, "dense covariance matrix file (d x d)"),
           [&](const std::string& v) { eo.cov_file = v; });
    b.bind("batch",
           est->add_option("--batch", eo.batch, "repeated observations file, one row each"),
           [&](const std::string& v) { eo.batch = v; });
    b.bind("theta",
           est->add_option("--theta", eo.theta_csv, "true parameter for diagnostics, comma list"),
           [&](const std::string& v) { eo.theta_csv = v; });
    b.bind("beta", est->add_option("--beta", eo.beta, "product normalizer")->capture_default_str(),
           [&](const std::string& v) { eo.beta = parse_double(v, "beta"); });
    b.bind("base",
           est->add_option("--base", eo.base, "base function: h1|h2|cos|linear|grid:<path>")
               ->capture_default_str(),
           [&](const std::string& v) { eo.base = v; });
    b.bind("cutoff-k",
           est->add_option("--cutoff-k", eo.cutoff_k, "per-axis frequency cutoff")
               ->capture_default_str(),
           [&](const std::string& v) { eo.cutoff_k = parse_int(v, "cutoff-k"); });
    b.bind("grid-m",
           est->add_option("--grid-m", eo.grid_m, "sampling grid size")->capture_default_str(),
           [&](const std::string& v) { eo.grid_m = parse_u64(v, "grid-m"); });
    b.bind("adaptive",
           est->add_flag("--adaptive", eo.adaptive, "estimate the covariance from --batch"),
           [&](const std::string& v) { eo.adaptive = parse_bool(v, "adaptive"); });
    b.bind("no-mirror",
           est->add_flag("--no-mirror", eo.no_mirror, "periodize literally instead of mirroring"),
           [&](const std::string& v) { eo.no_mirror = parse_bool(v, "no-mirror"); });
    b.bind("truncation",
           est->add_option("--truncation", eo.truncation, "hard|dyadic")->capture_default_str(),
           [&](const std::string& v) { eo.truncation = v; });
    b.bind("out", est->add_option("--out", eo.out, "output directory")->capture_default_str(),
           [&](const std::string& v) { eo.out = v; });
    est->add_option("--config", eo.config, "key = value config file (flags win)");
  }

  // lower-bound ------------------------------------------------------------
  auto* low = app.add_subcommand("lower-bound", "Bayes-risk ratio behind the minimax bound");
  {
    auto& b = low_bind;
    b.bind("d", low->add_option("--d", lo.d, "dimension, 1..10")->capture_default_str(),
           [&](const std::string& v) { lo.d = static_cast<int>(parse_int(v, "d")); });
    b.bind("sigma", low->add_option("--sigma", lo.sigma, "noise level")->capture_default_str(),
           [&](const std::string& v) { lo.sigma = parse_double(v, "sigma"); });
    b.bind("trials",
           low->add_option("--trials", lo.trials, "Monte Carlo draws")->capture_default_str(),
           [&](const std::string& v) { lo.trials = parse_u64(v, "trials"); });
    b.bind("seed", low->add_option("--seed", lo.seed, "RNG seed")->capture_default_str(),
           [&](const std::string& v) { lo.seed = parse_u64(v, "seed"); });
    b.bind("smoothness",
           low->add_option("--smoothness", lo.smoothness, "s in the risk rate")
               ->capture_default_str(),
           [&](const std::string& v) { lo.smoothness = parse_double(v, "smoothness"); });
    b.bind("out", low->add_option("--out", lo.out, "output directory")->capture_default_str(),
           [&](const std::string& v) { lo.out = v; });
    low->add_option("--config", lo.config, "key = value config file (flags win)");
  }

  // normal-check -----------------------------------------------------------
  auto* nc = app.add_subcommand("normal-check", "KS test of standardized estimator errors");
  {
    auto& b = nc_bind;
    b.bind("f", nc->add_option("--f", no_.f, "function: cos|linear|h1|h2|grid:<path>")
                   ->capture_default_str(),
           [&](const std::string& v) { no_.f = v; });
    b.bind("theta", nc->add_option("--theta", no_.theta, "true parameter")->capture_default_str(),
           [&](const std::string& v) { no_.theta = parse_double(v, "theta"); });
    b.bind("sigma",
           nc->add_option("--sigma", no_.sigma, "noise standard deviation")->capture_default_str(),
           [&](const std::string& v) { no_.sigma = parse_double(v, "sigma"); });
    b.bind("trials",
           nc->add_option("--trials", no_.trials, "Monte Carlo trials")->capture_default_str(),
           [&](const std::string& v) { no_.trials = parse_u64(v, "trials"); });
    b.bind("seed", nc->add_option("--seed", no_.seed, "RNG seed")->capture_default_str(),
           [&](const std::string& v) { no_.seed = parse_u64(v, "seed"); });
    b.bind("cutoff-k",
           nc->add_option("--cutoff-k", no_.cutoff_k, "frequency cutoff")->capture_default_str(),
           [&](const std::string& v) { no_.cutoff_k = parse_int(v, "cutoff-k"); });
    b.bind("grid-m",
           nc->add_option("--grid-m", no_.grid_m, "sampling grid size")->capture_default_str(),
           [&](const std::string& v) { no_.grid_m = parse_u64(v, "grid-m"); });
    b.bind("ks-threshold",
           nc->add_option("--ks-threshold", no_.ks_threshold, "pass/fail cutoff")
               ->capture_default_str(),
           [&](const std::string& v) { no_.ks_threshold = parse_double(v, "ks-threshold"); });
    b.bind("out", nc->add_option("--out", no_.out, "output directory")->capture_default_str(),
           [&](const std::string& v) { no_.out = v; });
    nc->add_option("--config", no_.config, "key = value config file (flags win)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      if (!so.config.empty()) sim_bind.apply(so.config);
      return run_simulate(so);
    }
    if (est->parsed()) {
      if (!eo.config.empty()) est_bind.apply(eo.config);
      eo.has_x = eo.has_x || est_x->count() > 0;
      eo.has_sigma2 = eo.has_sigma2 || est_sigma2->count() > 0;
      return run_estimate(eo);
    }
    if (low->parsed()) {
      if (!lo.config.empty()) low_bind.apply(lo.config);
      return run_lower_bound(lo);
    }
    if (nc->parsed()) {
      if (!no_.config.empty()) nc_bind.apply(no_.config);
      return run_normal_check(no_);
    }
  } catch (const fdb::OverflowGuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
