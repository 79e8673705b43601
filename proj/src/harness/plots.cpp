#include "marlab/harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "marlab/harness/metrics.hpp"

namespace marlab::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 860, kHeight = 480;
constexpr double kLeft = 70, kRight = 24, kTop = 42, kBottom = 52;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Scale {
  double x_max = 1, y_min = 0, y_max = 1;
  double x(double episode) const {
    return kLeft + (kWidth - kLeft - kRight) * (x_max <= 0 ? 0 : episode / x_max);
  }
  double y(double value) const {
    const double span = y_max - y_min;
    const double t = span <= 0 ? 0.5 : (value - y_min) / span;
    return kHeight - kBottom - (kHeight - kTop - kBottom) * t;
  }
};

std::string polyline(const std::vector<double>& values, const Scale& s,
                     const std::string& color, double opacity, double width) {
  std::ostringstream out;
  out << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-opacity=\"" << num(opacity) << "\" stroke-width=\""
      << num(width) << "\" points=\"";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << num(s.x(static_cast<double>(i))) << ',' << num(s.y(values[i]));
  }
  out << "\"/>\n";
  return out.str();
}

void axes(std::ostringstream& out, const Scale& s, const std::string& title) {
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kLeft) << "\" y=\"24\" font-family=\"sans-serif\""
      << " font-size=\"16\">" << title << "</text>\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom)
      << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
      << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\""
      << num(kLeft) << "\" y2=\"" << num(kHeight - kBottom)
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = s.x_max * i / 5.0;
    out << "<text x=\"" << num(s.x(fx)) << "\" y=\""
        << num(kHeight - kBottom + 18)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">"
        << tick_label(fx) << "</text>\n";
    const double fy = s.y_min + (s.y_max - s.y_min) * i / 5.0;
    out << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(s.y(fy))
        << "\" x2=\"" << num(kLeft) << "\" y2=\"" << num(s.y(fy))
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(s.y(fy) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << tick_label(fy) << "</text>\n";
  }
  out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\""
      << num(kHeight - 12)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">episode</text>\n";
  out << "<text x=\"16\" y=\"" << num((kTop + kHeight - kBottom) / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((kTop + kHeight - kBottom) / 2)
      << ")\">collective extrinsic reward</text>\n";
}

Scale fit(const std::vector<const std::vector<double>*>& series) {
  Scale s;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t longest = 1;
  for (const auto* v : series) {
    longest = std::max(longest, v->size());
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (lo == hi) {
    lo -= 1;
    hi += 1;
  }
  const double pad = 0.05 * (hi - lo);
  s.y_min = lo - pad;
  s.y_max = hi + pad;
  s.x_max = static_cast<double>(longest - 1);
  if (s.x_max <= 0) s.x_max = 1;
  return s;
}

void write_svg(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw PlotError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth)
      << " " << num(kHeight) << "\">\n"
      << body << "</svg>\n";
}

}  // namespace

std::vector<double> RunSeries::mean() const {
  std::vector<double> out;
  if (per_seed.empty()) return out;
  std::size_t len = per_seed.front().size();
  for (const auto& s : per_seed) len = std::min(len, s.size());
  out.resize(len, 0.0);
  for (const auto& s : per_seed) {
    for (std::size_t i = 0; i < len; ++i) out[i] += s[i];
  }
  for (double& v : out) v /= static_cast<double>(per_seed.size());
  return out;
}

RunSeries read_run_series(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) {
    throw PlotError("not a run directory: " + run_dir.string());
  }
  RunSeries series;
  series.label = run_dir.filename().string();
  const fs::path summary = run_dir / "summary.json";
  if (fs::exists(summary)) {
    std::ifstream in(summary);
    try {
      nlohmann::json j;
      in >> j;
      if (j.contains("method")) series.label = j["method"].get<std::string>();
    } catch (const nlohmann::json::exception&) {
      // keep the directory name
    }
  }

  std::vector<fs::path> seed_dirs;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    if (entry.is_directory() &&
        entry.path().filename().string().rfind("seed_", 0) == 0) {
      seed_dirs.push_back(entry.path());
    }
  }
  std::sort(seed_dirs.begin(), seed_dirs.end());
  for (const auto& dir : seed_dirs) {
    const fs::path csv = dir / "episodes.csv";
    if (!fs::exists(csv)) continue;
    const auto rows = read_csv(csv);
    if (rows.size() < 2) {
      throw PlotError("empty metrics file " + csv.string());
    }
    const auto& header = rows.front();
    const auto it =
        std::find(header.begin(), header.end(), "collective_extrinsic");
    if (it == header.end()) {
      throw PlotError("missing collective_extrinsic column in " +
                      csv.string());
    }
    const std::size_t col = static_cast<std::size_t>(it - header.begin());
    std::vector<double> values;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() <= col) {
        throw PlotError("short row in " + csv.string());
      }
      values.push_back(std::stod(rows[r][col]));
    }
    series.per_seed.push_back(std::move(values));
  }
  if (series.per_seed.empty()) {
    throw PlotError("no seed_*/episodes.csv found under " + run_dir.string());
  }
  return series;
}

void write_reward_curve_svg(const fs::path& path, const RunSeries& series) {
  std::vector<const std::vector<double>*> all;
  for (const auto& s : series.per_seed) all.push_back(&s);
  const Scale scale = fit(all);
  std::ostringstream body;
  axes(body, scale, series.label);
  for (const auto& s : series.per_seed) {
    body << polyline(s, scale, kPalette[0], 0.3, 1.2);
  }
  body << polyline(series.mean(), scale, kPalette[0], 1.0, 2.4);
  write_svg(path, body.str());
}

void write_comparison_svg(const fs::path& path,
                          const std::vector<RunSeries>& runs) {
  if (runs.empty()) throw PlotError("comparison needs at least one run");
  std::vector<std::vector<double>> means;
  for (const auto& r : runs) means.push_back(r.mean());
  std::vector<const std::vector<double>*> all;
  for (const auto& m : means) all.push_back(&m);
  const Scale scale = fit(all);
  std::ostringstream body;
  axes(body, scale, "method comparison");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    body << polyline(means[i], scale, color, 1.0, 2.2);
    const double ly = kTop + 16 + 18 * static_cast<double>(i);
    body << "<line x1=\"" << num(kWidth - 190) << "\" y1=\"" << num(ly - 4)
         << "\" x2=\"" << num(kWidth - 160) << "\" y2=\"" << num(ly - 4)
         << "\" stroke=\"" << color << "\" stroke-width=\"2.2\"/>\n";
    body << "<text x=\"" << num(kWidth - 152) << "\" y=\"" << num(ly)
         << "\" font-family=\"sans-serif\" font-size=\"12\">"
         << runs[i].label << "</text>\n";
  }
  write_svg(path, body.str());
}

std::vector<fs::path> emit_plots(const std::vector<fs::path>& run_dirs,
                                 const fs::path& comparison_path) {
  if (run_dirs.empty()) throw PlotError("no run directories given");
  std::vector<fs::path> written;
  std::vector<RunSeries> all;
  for (const auto& dir : run_dirs) {
    RunSeries series = read_run_series(dir);
    const fs::path out = dir / "reward_curve.svg";
    write_reward_curve_svg(out, series);
    written.push_back(out);
    all.push_back(std::move(series));
  }
  write_comparison_svg(comparison_path, all);
  written.push_back(comparison_path);
  return written;
}

}  // namespace marlab::harness
