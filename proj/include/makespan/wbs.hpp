#pragma once

// Workpackage counts per project: ingestion, descriptive statistics and a
// Gaussian kernel density estimate of the count distribution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "makespan/error.hpp"

namespace makespan {

struct ProjectRecord {
  std::string project_id;
  std::size_t workpackages = 0;
};

namespace detail {

inline std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    while (!cell.empty() && cell.back() == ' ') cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    f.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

inline std::size_t parse_count(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    throw Error(Errc::malformed_row, where + ": '" + s + "' is not an integer");
  }
  if (v < 1) throw Error(Errc::malformed_row, where + ": workpackages must be >= 1");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

// Two layouts are accepted:
//   project_id,workpackages       one row per project
//   project_id,wbs_code[,name]    one row per WBS element, dotted codes
//                                 ("1", "1.2", "1.2.3"); leaves are counted
inline std::vector<ProjectRecord> parse_wbs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<bool> hierarchical;
  std::vector<ProjectRecord> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::string>> codes;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no);
    const auto f = detail::csv_fields(line);
    if (!hierarchical) {
      if (f.size() == 2 && f[0] == "project_id" && f[1] == "workpackages") {
        hierarchical = false;
      } else if (f.size() >= 2 && f[0] == "project_id" && f[1] == "wbs_code") {
        hierarchical = true;
      } else {
        throw Error(Errc::malformed_row,
                    where + ": expected header project_id,workpackages or project_id,wbs_code");
      }
      continue;
    }
    if (f.size() < 2 || f[0].empty()) throw Error(Errc::malformed_row, where + ": missing fields");
    if (!*hierarchical) {
      if (f.size() != 2) throw Error(Errc::malformed_row, where + ": expected 2 fields");
      if (index.contains(f[0])) {
        throw Error(Errc::duplicate_project_id, where + ": project '" + f[0] + "' repeated");
      }
      index[f[0]] = out.size();
      out.push_back({f[0], detail::parse_count(f[1], where)});
      continue;
    }
    if (f[1].empty() || f[1].front() == '.' || f[1].back() == '.' ||
        f[1].find("..") != std::string::npos) {
      throw Error(Errc::malformed_row, where + ": bad wbs code '" + f[1] + "'");
    }
    auto [it, fresh] = index.try_emplace(f[0], out.size());
    if (fresh) {
      out.push_back({f[0], 0});
      codes.emplace_back();
    }
    auto& list = codes[it->second];
    if (std::find(list.begin(), list.end(), f[1]) != list.end()) {
      throw Error(Errc::malformed_row, where + ": wbs code '" + f[1] + "' repeated");
    }
    list.push_back(f[1]);
  }
  if (!hierarchical) throw Error(Errc::malformed_row, "empty WBS file");

  if (*hierarchical) {
    for (std::size_t p = 0; p < out.size(); ++p) {
      auto list = codes[p];
      std::sort(list.begin(), list.end());
      std::size_t leaves = 0;
      for (const auto& code : list) {
        const std::string prefix = code + ".";
        const auto next = std::lower_bound(list.begin(), list.end(), prefix);
        leaves += next != list.end() && next->starts_with(prefix) ? 0 : 1;
      }
      out[p].workpackages = leaves;
    }
  }
  return out;
}

inline double gaussian_kde(const std::vector<double>& values, double bandwidth, double x) {
  const double norm = 1.0 / (static_cast<double>(values.size()) * bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  for (double v : values) {
    const double z = (x - v) / bandwidth;
    s += std::exp(-0.5 * z * z);
  }
  return norm * s;
}

namespace detail {

// Linear-interpolation sample quantile on sorted data.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double sample_std_dev(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace detail

// 0.9 min(sd, IQR/1.34) n^(-1/5); the IQR term is skipped when it is zero.
// Zero when all values coincide.
inline double silverman_bandwidth(const std::vector<double>& values) {
  if (values.size() < 2) throw Error(Errc::insufficient_data, "need at least 2 values");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double sd = detail::sample_std_dev(values);
  const double iqr = detail::sorted_quantile(sorted, 0.75) - detail::sorted_quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

struct KdeCurve {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

inline constexpr std::size_t kDefaultKdePoints = 512;

// Density sampled on a uniform grid over [0, 1.1 max].
inline KdeCurve kde(const std::vector<double>& values, std::optional<double> bandwidth = {},
                    std::size_t points = kDefaultKdePoints) {
  if (values.size() < 2) throw Error(Errc::insufficient_data, "need at least 2 values");
  if (points < 2) throw Error(Errc::invalid_parameters, "need at least 2 grid points");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(Errc::non_positive_bandwidth,
                "bandwidth must be > 0 (got " + std::to_string(h) + ")");
  }
  double hi = 1.1 * *std::max_element(values.begin(), values.end());
  if (hi <= 0.0) hi = 4.0 * h;
  KdeCurve c{h, {}, {}};
  c.x.reserve(points);
  c.density.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = hi * static_cast<double>(i) / static_cast<double>(points - 1);
    c.x.push_back(x);
    c.density.push_back(gaussian_kde(values, h, x));
  }
  return c;
}

// Trapezoidal integral of the density over [min - 10h, max + 10h].
inline double kde_integral(const std::vector<double>& values, double bandwidth,
                           std::size_t points = 20'001) {
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 10.0 * bandwidth, hi = *hi_it + 10.0 * bandwidth;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double w = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
    s += w * gaussian_kde(values, bandwidth, lo + step * static_cast<double>(i));
  }
  return s * step;
}

// Global maximiser of the density: best point of a fine grid over the data
// range, polished by mean-shift iterations.
inline double kde_mode(const std::vector<double>& values, double bandwidth) {
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  if (*lo_it == *hi_it) return *lo_it;
  const std::size_t grid = 4001;
  double best_x = *lo_it, best = -1.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = *lo_it + (*hi_it - *lo_it) * static_cast<double>(i) / (grid - 1);
    const double d = gaussian_kde(values, bandwidth, x);
    if (d > best) {
      best = d;
      best_x = x;
    }
  }
  double x = best_x;
  for (int iter = 0; iter < 500; ++iter) {
    double num = 0.0, den = 0.0;
    for (double v : values) {
      const double z = (x - v) / bandwidth;
      const double k = std::exp(-0.5 * z * z);
      num += k * v;
      den += k;
    }
    const double next = num / den;
    if (std::abs(next - x) < 1e-12 * std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

struct SummaryStats {
  std::size_t n = 0;
  double min = 0.0, mode = 0.0, mean = 0.0, max = 0.0, std_dev = 0.0;
  double bandwidth = 0.0;
};

inline std::vector<double> counts_of(const std::vector<ProjectRecord>& records) {
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(static_cast<double>(r.workpackages));
  return v;
}

// Sample statistics (n - 1 denominator) with the mode taken as the argmax
// of the Silverman-bandwidth Gaussian KDE.
inline SummaryStats workpackage_stats(const std::vector<ProjectRecord>& records) {
  if (records.size() < 2) {
    throw Error(Errc::insufficient_data, "need at least 2 projects, got " +
                                             std::to_string(records.size()));
  }
  auto values = counts_of(records);
  std::sort(values.begin(), values.end());
  SummaryStats s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.back();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  s.std_dev = detail::sample_std_dev(values);
  s.bandwidth = silverman_bandwidth(values);
  s.mode = s.bandwidth > 0.0 ? kde_mode(values, s.bandwidth) : s.min;
  return s;
}

inline std::string kde_csv(const KdeCurve& c) {
  std::ostringstream out;
  out.precision(12);
  out << "count,density\n";
  for (std::size_t i = 0; i < c.x.size(); ++i) out << c.x[i] << ',' << c.density[i] << '\n';
  return out.str();
}

}  // namespace makespan
