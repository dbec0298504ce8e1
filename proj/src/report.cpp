#include "fdb/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fdb/errors.hpp"

namespace fdb {

const char* const kToolVersion = "0.1.0";

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& kv : config) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  config.emplace_back(key, value);
}

std::string RunManifest::line() const {
  std::ostringstream os;
  os << "# fourier-debias " << kToolVersion << ' ' << subcommand;
  for (const auto& kv : config) os << ' ' << kv.first << '=' << kv.second;
  return os.str();
}

std::string format_g17(double v) {
  // std::to_chars is locale-independent by definition.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_sweep_csv(const std::string& path, const RunManifest& manifest,
                     const std::vector<SimulationRow>& rows) {
  auto out = open_out(path);
  out << manifest.line() << '\n';
  out << "alpha,d,threshold,plugin_bias,tf_bias,adaptive_bias,plugin_var,tf_var,adaptive_var,"
         "plugin_mse,tf_mse,adaptive_mse,plugin_se,tf_se,adaptive_se,ref_half,ref_full,"
         "ref_sqrt_n,ref_inv_n\n";
  for (const auto& r : rows) {
    out << format_g17(r.alpha) << ',' << r.d << ',' << format_g17(r.threshold) << ','
        << format_g17(r.plugin_bias) << ',' << format_g17(r.tf_bias) << ','
        << format_g17(r.adaptive_bias) << ',' << format_g17(r.plugin_var) << ','
        << format_g17(r.tf_var) << ',' << format_g17(r.adaptive_var) << ','
        << format_g17(r.plugin_mse) << ',' << format_g17(r.tf_mse) << ','
        << format_g17(r.adaptive_mse) << ',' << format_g17(r.plugin_se) << ','
        << format_g17(r.tf_se) << ',' << format_g17(r.adaptive_se) << ','
        << format_g17(r.ref_half) << ',' << format_g17(r.ref_full) << ','
        << format_g17(r.ref_sqrt_n) << ',' << format_g17(r.ref_inv_n) << '\n';
  }
}

void write_adaptive_diff_csv(const std::string& path, const RunManifest& manifest,
                             const std::vector<AdaptiveDiffRow>& rows) {
  auto out = open_out(path);
  out << manifest.line() << '\n';
  out << "alpha,d,mean_diff,var_diff\n";
  for (const auto& r : rows)
    out << format_g17(r.alpha) << ',' << r.d << ',' << format_g17(r.mean_diff) << ','
        << format_g17(r.var_diff) << '\n';
}

void write_lower_bound_csv(const std::string& path, const RunManifest& manifest,
                           const LowerBoundResult& result, const LowerBoundConfig& cfg) {
  auto out = open_out(path);
  out << manifest.line() << '\n';
  out << "d,sigma,trials,eps,ratio,mc_se,reference,risk_lower_bound\n";
  out << cfg.d << ',' << format_g17(cfg.sigma) << ',' << cfg.trials << ','
      << format_g17(result.eps) << ',' << format_g17(result.ratio) << ','
      << format_g17(result.mc_se) << ',' << format_g17(result.reference) << ','
      << format_g17(result.risk_lower_bound) << '\n';
}

void write_normal_check_csv(const std::string& path, const RunManifest& manifest,
                            const NormalCheckReport& report) {
  auto out = open_out(path);
  out << manifest.line() << '\n';
  out << "trials,ks,sigma_f,mean_std_error,k_ratio\n";
  out << report.trials << ',' << format_g17(report.ks) << ',' << format_g17(report.sigma_f)
      << ',' << format_g17(report.mean_std_error) << ',' << format_g17(report.k_ratio) << '\n';
}

namespace {

struct Series {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<std::pair<double, double>> pts;  // (x, y), already positive
};

constexpr double kWidth = 720.0, kHeight = 520.0;
constexpr double kMarginL = 70.0, kMarginR = 140.0, kMarginT = 40.0, kMarginB = 50.0;

std::string fmt_tick(int decade) {
  std::ostringstream os;
  os << "1e" << decade;
  return os.str();
}

// One log-log chart: solid per-estimator polylines, dashed reference curves,
// decade gridlines on both axes.
void write_loglog_svg(const std::string& path, const RunManifest& manifest,
                      const std::string& title, const std::vector<Series>& series) {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  for (const auto& s : series)
    for (const auto& p : s.pts) {
      const double lx = std::log10(p.first), ly = std::log10(p.second);
      if (!any) {
        xmin = xmax = lx;
        ymin = ymax = ly;
        any = true;
      } else {
        xmin = std::min(xmin, lx);
        xmax = std::max(xmax, lx);
        ymin = std::min(ymin, ly);
        ymax = std::max(ymax, ly);
      }
    }
  if (!any) {
    xmin = ymin = -1.0;
    xmax = ymax = 1.0;
  }
  if (xmax - xmin < 1e-9) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-9) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double plot_w = kWidth - kMarginL - kMarginR;
  const double plot_h = kHeight - kMarginT - kMarginB;
  auto px = [&](double lx) { return kMarginL + (lx - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double ly) { return kMarginT + (ymax - ly) / (ymax - ymin) * plot_h; };

  auto out = open_out(path);
  out << "<!-- " << manifest.line() << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kMarginL << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

  // decade gridlines
  for (int dec = static_cast<int>(std::ceil(xmin)); dec <= static_cast<int>(std::floor(xmax));
       ++dec) {
    const double X = px(dec);
    out << "<line x1=\"" << X << "\" y1=\"" << kMarginT << "\" x2=\"" << X << "\" y2=\""
        << kMarginT + plot_h << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << X << "\" y=\"" << kMarginT + plot_h + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << fmt_tick(dec) << "</text>\n";
  }
  for (int dec = static_cast<int>(std::ceil(ymin)); dec <= static_cast<int>(std::floor(ymax));
       ++dec) {
    const double Y = py(dec);
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << Y << "\" x2=\"" << kMarginL + plot_w
        << "\" y2=\"" << Y << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << kMarginL - 6 << "\" y=\"" << Y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << fmt_tick(dec) << "</text>\n";
  }
  out << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out << "<text x=\"" << kMarginL + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">d / n</text>\n";

  double legend_y = kMarginT + 10;
  for (const auto& s : series) {
    if (s.pts.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
        << (s.dashed ? 1.5 : 2.0) << '"';
    if (s.dashed) out << " stroke-dasharray=\"6,4\"";
    out << " points=\"";
    for (const auto& p : s.pts)
      out << px(std::log10(p.first)) << ',' << py(std::log10(p.second)) << ' ';
    out << "\"/>\n";
    for (const auto& p : s.pts)
      if (!s.dashed)
        out << "<circle cx=\"" << px(std::log10(p.first)) << "\" cy=\""
            << py(std::log10(p.second)) << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    const double lx = kMarginL + plot_w + 10;
    out << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\"" << lx + 24 << "\" y2=\""
        << legend_y << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << lx + 30 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
}

void add_point(Series& s, double x, double y) {
  if (std::isfinite(x) && std::isfinite(y) && x > 0.0 && y > 0.0) s.pts.emplace_back(x, y);
}

}  // namespace

void write_sweep_svgs(const std::string& out_dir, const RunManifest& manifest,
                      const std::vector<SimulationRow>& rows, bool adaptive_enabled,
                      std::size_t n) {
  struct Metric {
    const char* file;
    const char* title;
    double SimulationRow::*plugin;
    double SimulationRow::*tf;
    double SimulationRow::*adaptive;
  };
  const Metric metrics[] = {
      {"bias.svg", "absolute bias vs d/n", &SimulationRow::plugin_bias, &SimulationRow::tf_bias,
       &SimulationRow::adaptive_bias},
      {"variance.svg", "variance vs d/n", &SimulationRow::plugin_var, &SimulationRow::tf_var,
       &SimulationRow::adaptive_var},
      {"mse.svg", "mse vs d/n", &SimulationRow::plugin_mse, &SimulationRow::tf_mse,
       &SimulationRow::adaptive_mse},
  };
  const double dn = static_cast<double>(n);
  for (const auto& m : metrics) {
    std::vector<Series> series;
    Series plugin{"plug-in", "#d62728", false, {}};
    Series tf{"debiased", "#1f77b4", false, {}};
    Series adaptive{"adaptive", "#2ca02c", false, {}};
    Series rhalf{"(d/n)^(s/2)", "#888888", true, {}};
    Series rfull{"(d/n)^s", "#bbaa66", true, {}};
    Series rsqn{"n^(-1/2)", "#aa88cc", true, {}};
    Series rinvn{"n^(-1)", "#cc88aa", true, {}};
    for (const auto& r : rows) {
      const double x = static_cast<double>(r.d) / dn;
      add_point(plugin, x, r.*(m.plugin));
      add_point(tf, x, r.*(m.tf));
      if (adaptive_enabled) add_point(adaptive, x, r.*(m.adaptive));
      add_point(rhalf, x, r.ref_half);
      add_point(rfull, x, r.ref_full);
      add_point(rsqn, x, r.ref_sqrt_n);
      add_point(rinvn, x, r.ref_inv_n);
    }
    series.push_back(std::move(plugin));
    series.push_back(std::move(tf));
    if (adaptive_enabled) series.push_back(std::move(adaptive));
    series.push_back(std::move(rhalf));
    series.push_back(std::move(rfull));
    series.push_back(std::move(rsqn));
    series.push_back(std::move(rinvn));
    write_loglog_svg(out_dir + "/" + m.file, manifest, m.title, series);
  }
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config file " + path + " line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config file " + path + " line " + std::to_string(lineno) +
                        ": empty key");
    out[key] = value;
  }
  return out;
}

}  // namespace fdb
