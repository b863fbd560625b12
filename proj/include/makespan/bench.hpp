#pragma once

// Timing harness for the bound methods and the quadratic CPU-time model
//   Y = a00 + a10 X1 + a01 X2 + a11 X1 X2 + a20 X1^2 + a02 X2^2
// with X1 = activity count and X2 = supporting points.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "makespan/bounds.hpp"
#include "makespan/error.hpp"
#include "makespan/network.hpp"

namespace makespan {

enum class BenchMethod { kleindorfer_upper, kleindorfer_lower, dodin, spelde };

inline constexpr std::array<BenchMethod, 4> kAllBenchMethods{
    BenchMethod::kleindorfer_upper, BenchMethod::kleindorfer_lower, BenchMethod::dodin,
    BenchMethod::spelde};

constexpr std::string_view to_string(BenchMethod m) noexcept {
  switch (m) {
    case BenchMethod::kleindorfer_upper: return "kleindorfer-upper";
    case BenchMethod::kleindorfer_lower: return "kleindorfer-lower";
    case BenchMethod::dodin: return "dodin";
    case BenchMethod::spelde: return "spelde";
  }
  return "dodin";
}

inline std::optional<BenchMethod> parse_bench_method(std::string_view name) noexcept {
  for (BenchMethod m : kAllBenchMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

struct BenchmarkRecord {
  std::string method;
  std::size_t x1 = 0;
  std::size_t x2 = 0;
  double y_seconds = 0.0;  // median over repetitions; NaN if the cell failed
  double y_mean = 0.0;
  OpCounts ops;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  std::string error;
};

struct GridConfig {
  std::vector<BenchMethod> methods{kAllBenchMethods.begin(), kAllBenchMethods.end()};
  std::vector<std::size_t> x1{300, 600, 900, 1200};
  std::vector<std::size_t> x2{50, 100, 200};
  std::size_t repetitions = 3;
  std::uint64_t seed = 1;
  std::size_t layer_count = 10;
  Family family = Family::triangular;
};

// Runs one bound method and returns the operation counts of the side it
// computes (Spelde runs in expectation mode).
inline OpCounts run_method(BenchMethod m, const ActivityNetwork& net, std::size_t sp) {
  DiscretizationConfig cfg;
  cfg.sp = sp;
  switch (m) {
    case BenchMethod::kleindorfer_upper: return kleindorfer_upper(net, cfg).ops;
    case BenchMethod::kleindorfer_lower: return kleindorfer_lower(net, cfg).ops;
    case BenchMethod::dodin: return dodin_upper(net, cfg).ops;
    case BenchMethod::spelde: return spelde_bounds(net, cfg, SpeldeMode::expectation).total_ops();
  }
  return {};
}

namespace detail {

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace detail

// One network per X1 (shared by all methods and X2 values). Every cell runs
// a discarded warm-up, then `repetitions` timed runs. Cells run serially; a
// failing cell is recorded and the grid continues.
inline std::vector<BenchmarkRecord> run_grid(const GridConfig& grid) {
  if (grid.methods.empty() || grid.x1.empty() || grid.x2.empty()) {
    throw Error(Errc::invalid_parameters, "benchmark grid must be non-empty");
  }
  if (grid.repetitions == 0) throw Error(Errc::invalid_parameters, "repetitions must be >= 1");
  std::vector<BenchmarkRecord> out;
  for (std::size_t x1 : grid.x1) {
    GeneratorParams gp;
    gp.activity_count = x1;
    gp.layer_count = std::min(grid.layer_count, x1);
    gp.family = grid.family;
    gp.seed = grid.seed;
    const ActivityNetwork net = generate_random(gp);
    for (std::size_t x2 : grid.x2) {
      for (BenchMethod m : grid.methods) {
        BenchmarkRecord r{std::string(to_string(m)), x1, x2, 0.0, 0.0, {}, grid.repetitions,
                          grid.seed, {}};
        try {
          run_method(m, net, x2);
          std::vector<double> times;
          for (std::size_t k = 0; k < grid.repetitions; ++k) {
            const auto start = std::chrono::steady_clock::now();
            r.ops = run_method(m, net, x2);
            times.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
          }
          r.y_seconds = detail::median(times);
          double sum = 0.0;
          for (double t : times) sum += t;
          r.y_mean = sum / static_cast<double>(times.size());
        } catch (const Error& e) {
          r.y_seconds = r.y_mean = std::numeric_limits<double>::quiet_NaN();
          r.error = e.what();
        }
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

inline constexpr std::array<std::string_view, 6> kCoefficientNames{"a00", "a10", "a01",
                                                                    "a11", "a20", "a02"};

struct RegressionModel {
  std::array<double, 6> coefficients{};  // a00, a10, a01, a11, a20, a02
  double r_squared = 0.0;
  std::vector<double> residuals;
};

inline std::array<double, 6> regressors(double x1, double x2) noexcept {
  return {1.0, x1, x2, x1 * x2, x1 * x1, x2 * x2};
}

inline double evaluate(const RegressionModel& m, double x1, double x2) noexcept {
  const auto r = regressors(x1, x2);
  double y = 0.0;
  for (std::size_t j = 0; j < 6; ++j) y += m.coefficients[j] * r[j];
  return y;
}

// Least squares by column-pivoting QR on the column-scaled design matrix.
// Failed cells (NaN Y) are skipped.
inline RegressionModel fit_polynomial(const std::vector<BenchmarkRecord>& records) {
  std::vector<const BenchmarkRecord*> used;
  for (const auto& r : records) {
    if (std::isfinite(r.y_seconds)) used.push_back(&r);
  }
  const auto n = static_cast<Eigen::Index>(used.size());
  if (n < 6) {
    throw Error(Errc::rank_deficient_design,
                "need at least 6 records for 6 coefficients, got " + std::to_string(n));
  }
  Eigen::MatrixXd a(n, 6);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = regressors(static_cast<double>(used[i]->x1), static_cast<double>(used[i]->x2));
    for (Eigen::Index j = 0; j < 6; ++j) a(i, j) = r[j];
    y(i) = used[i]->y_seconds;
  }
  const Eigen::VectorXd scale = a.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < 6; ++j) {
    if (scale(j) == 0.0) throw Error(Errc::rank_deficient_design, "regressor column is all zero");
  }
  const Eigen::MatrixXd scaled = a * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < 6) {
    throw Error(Errc::rank_deficient_design,
                "design matrix has rank " + std::to_string(qr.rank()) + " < 6");
  }
  const Eigen::VectorXd beta = qr.solve(y).cwiseQuotient(scale);

  RegressionModel m;
  for (std::size_t j = 0; j < 6; ++j) m.coefficients[j] = beta(static_cast<Eigen::Index>(j));
  const Eigen::VectorXd res = y - a * beta;
  m.residuals.assign(res.data(), res.data() + res.size());
  const double ss_res = res.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  m.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return m;
}

inline constexpr std::array<std::string_view, 5> kRegressorNames{"X1", "X2", "X1*X2", "X1^2",
                                                                  "X2^2"};

struct Correlations {
  std::array<double, 5> r{};          // Pearson r of Y with each regressor, in kRegressorNames order
  std::array<std::size_t, 5> ranking{};  // regressor indices by descending |r|
};

inline double pearson(const std::vector<double>& x, const std::vector<double>& y,
                      std::string_view what) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0) throw Error(Errc::zero_variance_input, "Y is constant");
  if (sxx == 0.0) throw Error(Errc::zero_variance_input, std::string(what) + " is constant");
  return sxy / std::sqrt(sxx * syy);
}

inline Correlations correlations(const std::vector<BenchmarkRecord>& records) {
  std::vector<double> y;
  std::array<std::vector<double>, 5> cols;
  for (const auto& r : records) {
    if (!std::isfinite(r.y_seconds)) continue;
    y.push_back(r.y_seconds);
    const auto reg = regressors(static_cast<double>(r.x1), static_cast<double>(r.x2));
    for (std::size_t j = 0; j < 5; ++j) cols[j].push_back(reg[j + 1]);
  }
  if (y.size() < 2) throw Error(Errc::insufficient_data, "need at least 2 records");
  Correlations c;
  for (std::size_t j = 0; j < 5; ++j) c.r[j] = pearson(cols[j], y, kRegressorNames[j]);
  for (std::size_t j = 0; j < 5; ++j) c.ranking[j] = j;
  std::stable_sort(c.ranking.begin(), c.ranking.end(), [&](std::size_t l, std::size_t r) {
    return std::abs(c.r[l]) > std::abs(c.r[r]);
  });
  return c;
}

// Relative errors 100 (Y - Yhat) / Y laid out as rows of (X1, X2) cells with
// one column per method. Empty entries mark cells with Y = 0 or no record.
struct RelativeErrorTable {
  struct Row {
    std::size_t x1, x2;
    std::vector<std::optional<double>> percent;
  };
  std::vector<std::string> methods;
  std::vector<Row> rows;
  bool flagged = false;  // some cell had Y = 0
};

inline std::optional<double> relative_error(double y, double predicted) noexcept {
  if (y == 0.0 || !std::isfinite(y)) return std::nullopt;
  return 100.0 * (y - predicted) / y;
}

inline RelativeErrorTable relative_errors(const std::vector<BenchmarkRecord>& records,
                                          const std::map<std::string, RegressionModel>& models) {
  RelativeErrorTable t;
  for (const auto& [name, m] : models) t.methods.push_back(name);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> row_of;
  for (const auto& r : records) row_of.try_emplace({r.x1, r.x2}, 0);
  for (auto& [key, idx] : row_of) {
    idx = t.rows.size();
    t.rows.push_back({key.first, key.second, std::vector<std::optional<double>>(t.methods.size())});
  }
  for (const auto& r : records) {
    const auto it = models.find(r.method);
    if (it == models.end()) continue;
    const auto col = static_cast<std::size_t>(std::distance(models.begin(), it));
    const auto e = relative_error(
        r.y_seconds, evaluate(it->second, static_cast<double>(r.x1), static_cast<double>(r.x2)));
    if (r.y_seconds == 0.0) t.flagged = true;
    t.rows[row_of.at({r.x1, r.x2})].percent[col] = e;
  }
  return t;
}

// Published coefficient sets for the four methods (CPU seconds on 1997
// hardware) with the r-squared reported against the original timings.
// Repeating decimals are kept at 10 significant digits.
inline const std::map<std::string, RegressionModel>& reference_models() {
  static const std::map<std::string, RegressionModel> models = [] {
    std::map<std::string, RegressionModel> m;
    m["kleindorfer-upper"].coefficients = {22.33333333, -0.0308, -0.4476,
                                           5.96e-4,     1.111111111e-6, 1.716666667e-3};
    m["kleindorfer-lower"].coefficients = {20.883,    -2.818e-2, -0.4333,
                                           5.897e-4,  -1.852e-7, 1.673333333e-3};
    m["dodin"].coefficients = {21.83333333, -2.92e-2, -0.4465, 5.926666667e-4, 4.63e-7, 1.64e-3};
    m["spelde"].coefficients = {0.09583333333, -2.2e-4,  -1.857e-3,
                                1.148e-5,      9.259e-8, 8.333333333e-6};
    m["kleindorfer-upper"].r_squared = m["kleindorfer-lower"].r_squared = 0.997;
    m["dodin"].r_squared = 0.997;
    m["spelde"].r_squared = 0.999;
    return m;
  }();
  return models;
}

// Records whose Y is exactly the model's prediction on every grid cell.
inline std::vector<BenchmarkRecord> synthesize_records(const std::string& method,
                                                       const RegressionModel& model,
                                                       const std::vector<std::size_t>& x1s,
                                                       const std::vector<std::size_t>& x2s) {
  std::vector<BenchmarkRecord> out;
  for (std::size_t x1 : x1s) {
    for (std::size_t x2 : x2s) {
      BenchmarkRecord r;
      r.method = method;
      r.x1 = x1;
      r.x2 = x2;
      r.y_seconds = r.y_mean = evaluate(model, static_cast<double>(x1), static_cast<double>(x2));
      r.repetitions = 1;
      out.push_back(r);
    }
  }
  return out;
}

inline std::vector<BenchmarkRecord> records_for(const std::vector<BenchmarkRecord>& records,
                                                std::string_view method) {
  std::vector<BenchmarkRecord> out;
  for (const auto& r : records) {
    if (r.method == method) out.push_back(r);
  }
  return out;
}

inline constexpr std::string_view kRecordsHeader =
    "method,x1,x2,y_seconds,convs,prods,mins,dups,reps,seed";

inline std::string records_csv(const std::vector<BenchmarkRecord>& records) {
  std::ostringstream out;
  out.precision(17);
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.x1 << ',' << r.x2 << ',';
    if (std::isfinite(r.y_seconds)) {
      out << r.y_seconds;
    } else {
      out << "nan";
    }
    out << ',' << r.ops.convolutions << ',' << r.ops.products << ',' << r.ops.min_ops << ','
        << r.ops.duplications << ',' << r.repetitions << ',' << r.seed << '\n';
  }
  return out.str();
}

inline std::vector<BenchmarkRecord> parse_records_csv(std::string_view text) {
  std::vector<BenchmarkRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kRecordsHeader) {
        throw Error(Errc::malformed_row,
                    "line " + std::to_string(line_no) + ": expected header " +
                        std::string(kRecordsHeader));
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    const std::string where = "line " + std::to_string(line_no);
    if (f.size() != 10) throw Error(Errc::malformed_row, where + ": expected 10 fields");
    try {
      BenchmarkRecord r;
      r.method = f[0];
      r.x1 = std::stoull(f[1]);
      r.x2 = std::stoull(f[2]);
      r.y_seconds = r.y_mean =
          f[3] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[3]);
      r.ops = {std::stoull(f[4]), std::stoull(f[5]), std::stoull(f[6]), std::stoull(f[7])};
      r.repetitions = std::stoull(f[8]);
      r.seed = std::stoull(f[9]);
      if (r.x1 < 1 || r.x2 < 1 || r.y_seconds < 0.0) {
        throw Error(Errc::malformed_row, "x1, x2 must be >= 1 and y_seconds >= 0");
      }
      out.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(Errc::malformed_row, where + ": " + e.detail());
    } catch (const std::exception&) {
      throw Error(Errc::malformed_row, where + ": non-numeric field");
    }
  }
  if (!header_seen) throw Error(Errc::malformed_row, "missing header " + std::string(kRecordsHeader));
  return out;
}

}  // namespace makespan
