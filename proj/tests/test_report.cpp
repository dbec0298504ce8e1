#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "fdb/errors.hpp"
#include "fdb/report.hpp"

namespace fs = std::filesystem;

namespace {

struct ScratchDir {
  fs::path path;
  ScratchDir() : path(fs::temp_directory_path() / "fdb_report_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fdb::SimulationRow sample_row() {
  fdb::SimulationRow r;
  r.alpha = 0.45;
  r.d = 63;
  r.threshold = 1.0 / 0.55;
  r.plugin_bias = 0.1;
  r.tf_bias = 0.3333333333333333;
  r.adaptive_bias = std::nan("");
  r.plugin_var = 1e-300;
  r.tf_var = 2.5e17;
  r.adaptive_var = std::nan("");
  r.plugin_mse = 0.25;
  r.tf_mse = 0.5;
  r.adaptive_mse = std::nan("");
  r.plugin_se = 1e-3;
  r.tf_se = 2e-3;
  r.adaptive_se = std::nan("");
  r.ref_half = 0.01;
  r.ref_full = 1e-4;
  r.ref_sqrt_n = 0.01;
  r.ref_inv_n = 1e-4;
  return r;
}

}  // namespace

TEST_CASE("g17 formatting round-trips every double and spells nan plainly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 3.141592653589793, 0.0,
                   -0.0, 1e308, 5e-324}) {
    const std::string s = fdb::format_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(fdb::format_g17(std::nan("")) == "nan");
  CHECK(fdb::format_g17(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("manifest keeps insertion order and overwrites in place") {
  fdb::RunManifest m;
  m.subcommand = "sweep";
  m.set("n", "10000");
  m.set("trials", "2000");
  m.set("n", "500");  // overwrite must not reorder
  CHECK(m.line() == std::string("# fourier-debias ") + fdb::kToolVersion +
                        " sweep n=500 trials=2000");
}

TEST_CASE("sweep csv: manifest first, frozen header, lossless numeric cells") {
  ScratchDir dir;
  fdb::RunManifest m;
  m.subcommand = "sweep";
  m.set("seed", "1");
  const std::vector<fdb::SimulationRow> rows = {sample_row(), sample_row()};
  const std::string path = dir.file("sweep.csv");
  fdb::write_sweep_csv(path, m, rows);

  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == m.line());
  CHECK(lines[1] ==
        "alpha,d,threshold,plugin_bias,tf_bias,adaptive_bias,plugin_var,tf_var,"
        "adaptive_var,plugin_mse,tf_mse,adaptive_mse,plugin_se,tf_se,adaptive_se,"
        "ref_half,ref_full,ref_sqrt_n,ref_inv_n");
  CHECK(lines[2] == lines[3]);

  // split the data row and parse the cells back
  std::vector<std::string> cells;
  std::stringstream ss(lines[2]);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 19);
  CHECK(std::strtod(cells[0].c_str(), nullptr) == 0.45);
  CHECK(cells[1] == "63");
  CHECK(std::strtod(cells[2].c_str(), nullptr) == 1.0 / 0.55);
  CHECK(std::strtod(cells[4].c_str(), nullptr) == 0.3333333333333333);
  CHECK(cells[5] == "nan");
  CHECK(std::strtod(cells[6].c_str(), nullptr) == 1e-300);
  CHECK(std::strtod(cells[7].c_str(), nullptr) == 2.5e17);
}

TEST_CASE("diff, lower-bound and normality csv headers are stable") {
  ScratchDir dir;
  fdb::RunManifest m;
  m.subcommand = "x";

  fdb::write_adaptive_diff_csv(dir.file("diff.csv"), m, {{0.5, 100, 1e-5, 2e-9}});
  auto lines = read_lines(dir.file("diff.csv"));
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == "alpha,d,mean_diff,var_diff");

  fdb::LowerBoundConfig lb_cfg;
  fdb::LowerBoundResult lb{0.52, 1e-3, 0.025, 0.75, 1e-9};
  fdb::write_lower_bound_csv(dir.file("lb.csv"), m, lb, lb_cfg);
  lines = read_lines(dir.file("lb.csv"));
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == "d,sigma,trials,eps,ratio,mc_se,reference,risk_lower_bound");
  CHECK(lines[2].substr(0, 2) == "1,");

  fdb::NormalCheckReport rep;
  rep.ks = 0.008;
  rep.sigma_f = 0.06;
  rep.mean_std_error = -0.002;
  rep.k_ratio = 0.4;
  rep.trials = 10000;
  fdb::write_normal_check_csv(dir.file("nc.csv"), m, rep);
  lines = read_lines(dir.file("nc.csv"));
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == "trials,ks,sigma_f,mean_std_error,k_ratio");
  CHECK(lines[2].substr(0, 6) == "10000,");
}

TEST_CASE("csv writers refuse unwritable paths") {
  fdb::RunManifest m;
  CHECK_THROWS_AS(fdb::write_sweep_csv("/nonexistent_dir_zz/x.csv", m, {}),
                  fdb::ConfigError);
}

TEST_CASE("sweep charts carry the manifest and dashed reference curves") {
  ScratchDir dir;
  fdb::RunManifest m;
  m.subcommand = "sweep";
  m.set("seed", "9");
  auto row_lo = sample_row();
  auto row_hi = sample_row();
  row_hi.alpha = 0.65;
  row_hi.d = 398;
  fdb::write_sweep_svgs(dir.path.string(), m, {row_lo, row_hi}, false, 10000);

  for (const char* name : {"bias.svg", "variance.svg", "mse.svg"}) {
    const std::string body = slurp(dir.file(name));
    CHECK(body.find("<svg") != std::string::npos);
    CHECK(body.find("<polyline") != std::string::npos);
    CHECK(body.find("stroke-dasharray") != std::string::npos);
    CHECK(body.find("<!-- " + m.line() + " -->") != std::string::npos);
    // adaptive disabled and its cells are nan: no adaptive legend entry
    CHECK(body.find(">adaptive<") == std::string::npos);
  }
}

TEST_CASE("config files: comments, padding, first equals sign, last value wins") {
  ScratchDir dir;
  const std::string path = dir.file("run.cfg");
  {
    std::ofstream out(path);
    out << "# full line comment\n";
    out << "  n = 10000   # trailing comment\n";
    out << "base=h2\n";
    out << "\n";
    out << "   \t  \n";
    out << "expr = a=b\n";
    out << "n = 500\n";
    out << "empty =\n";
  }
  const auto kv = fdb::parse_config_file(path);
  CHECK(kv.size() == 4);
  CHECK(kv.at("n") == "500");
  CHECK(kv.at("base") == "h2");
  CHECK(kv.at("expr") == "a=b");
  CHECK(kv.at("empty") == "");
}

TEST_CASE("config file errors carry the offending line number") {
  ScratchDir dir;
  const std::string path = dir.file("bad.cfg");
  {
    std::ofstream out(path);
    out << "n = 10\n";
    out << "just some words\n";
  }
  try {
    fdb::parse_config_file(path);
    FAIL("expected a config error");
  } catch (const fdb::ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  {
    std::ofstream out(path, std::ios::trunc);
    out << " = 3\n";
  }
  try {
    fdb::parse_config_file(path);
    FAIL("expected a config error");
  } catch (const fdb::ConfigError& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    CHECK(std::string(e.what()).find("empty key") != std::string::npos);
  }

  CHECK_THROWS_AS(fdb::parse_config_file(dir.file("missing.cfg")), fdb::ConfigError);
}
