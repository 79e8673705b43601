#include "marlab/harness/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace marlab::harness {

using nlohmann::json;

MethodSummary read_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ComparisonError("cannot open summary file " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ComparisonError(path.string() + ": " + e.what());
  }
  MethodSummary s;
  try {
    s.method = j.at("method").get<std::string>();
    s.environment = j.at("environment").get<std::string>();
    for (const auto& row : j.at("seeds")) {
      s.seeds.push_back(row.at("seed").get<std::uint64_t>());
    }
    s.tail_mean = j.at("aggregate").at("mean").get<double>();
    s.tail_std = j.at("aggregate").at("std").get<double>();
  } catch (const json::exception& e) {
    throw ComparisonError(path.string() + ": malformed summary: " + e.what());
  }
  std::sort(s.seeds.begin(), s.seeds.end());
  return s;
}

Comparison compare_methods(const std::vector<MethodSummary>& summaries) {
  if (summaries.size() < 2) {
    throw ComparisonError("comparison needs at least two summaries");
  }
  for (std::size_t i = 1; i < summaries.size(); ++i) {
    if (summaries[i].environment != summaries[0].environment) {
      throw ComparisonError("summaries mix environments: " +
                            summaries[0].environment + " vs " +
                            summaries[i].environment);
    }
    if (summaries[i].seeds != summaries[0].seeds) {
      throw ComparisonError("summaries use different seed sets");
    }
  }
  Comparison c;
  const int n = static_cast<int>(summaries.size());
  c.percentage.resize(n, n);
  for (const auto& s : summaries) {
    c.labels.push_back(s.method);
    c.means.push_back(s.tail_mean);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      c.percentage(i, j) =
          c.means[j] == 0.0
              ? std::numeric_limits<double>::quiet_NaN()
              : (c.means[i] - c.means[j]) / c.means[j] * 100.0;
    }
  }
  return c;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string render_table(const Comparison& c) {
  std::ostringstream out;
  std::size_t width = 10;
  for (const auto& l : c.labels) width = std::max(width, l.size() + 2);
  auto pad = [&](const std::string& s) {
    return s + std::string(width > s.size() ? width - s.size() : 1, ' ');
  };
  out << pad("method") << "tail_mean\n";
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    out << pad(c.labels[i]) << fixed(c.means[i], 1) << "\n";
  }
  out << "\npairwise difference, (row - col) / col * 100:\n";
  out << pad("");
  for (const auto& l : c.labels) out << pad(l);
  out << "\n";
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    out << pad(c.labels[i]);
    for (std::size_t j = 0; j < c.labels.size(); ++j) {
      out << pad(i == j ? "-" : fixed(c.percentage(i, j), 1) + "%");
    }
    out << "\n";
  }
  return out.str();
}

std::string render_csv(const Comparison& c) {
  std::ostringstream out;
  out << "method,tail_mean";
  for (const auto& l : c.labels) out << ",pct_vs_" << l;
  out << "\n";
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    out << c.labels[i] << "," << fixed(c.means[i], 6);
    for (std::size_t j = 0; j < c.labels.size(); ++j) {
      out << "," << (i == j ? "0" : fixed(c.percentage(i, j), 6));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace marlab::harness
