#pragma once

// JSON and CSV renderings of every result type.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "makespan/bench.hpp"
#include "makespan/bounds.hpp"
#include "makespan/io.hpp"
#include "makespan/point.hpp"
#include "makespan/wbs.hpp"

namespace makespan {

inline json to_json(const OpCounts& ops) {
  return {{"convolutions", ops.convolutions},
          {"products", ops.products},
          {"min_ops", ops.min_ops},
          {"duplications", ops.duplications}};
}

inline json to_json(const BoundSide& side) {
  return {{"distribution", to_json(side.distribution)},
          {"mean", side.distribution.mean()},
          {"ops", to_json(side.ops)}};
}

inline json to_json(const MakespanBounds& b) {
  json j{{"method", b.method}, {"lower", to_json(b.lower)}, {"upper", to_json(b.upper)},
         {"ops", to_json(b.total_ops())}};
  if (b.method.starts_with("spelde")) {
    j["upper_truncated"] = b.upper_truncated;
    j["paths_used"] = b.paths_used;
  }
  return j;
}

inline json to_json(const DodinResult& r) {
  json trace = json::array();
  for (const auto& s : r.trace) {
    trace.push_back({{"kind", std::string(to_string(s.kind))},
                     {"node", s.node},
                     {"consumed", s.consumed},
                     {"produced", s.produced}});
  }
  return {{"method", "dodin"},
          {"upper", {{"distribution", to_json(r.distribution)},
                     {"mean", r.distribution.mean()},
                     {"ops", to_json(r.ops)}}},
          {"ops", to_json(r.ops)},
          {"trace", std::move(trace)}};
}

inline json to_json(const PointEstimate& e, const ActivityNetwork& net) {
  std::vector<std::string> ids;
  for (std::size_t a : e.critical_path) ids.push_back(net.arc(a).id);
  return {{"method", e.method}, {"mean", e.mean}, {"std_dev", e.std_dev}, {"critical_path", ids}};
}

inline json to_json(const McResult& r, const ActivityNetwork& net) {
  json crit = json::object();
  for (std::size_t a = 0; a < r.criticality.size(); ++a) crit[net.arc(a).id] = r.criticality[a];
  return {{"method", "montecarlo"},
          {"n", r.n},
          {"seed", r.seed},
          {"mean", r.mean},
          {"std_dev", r.std_dev},
          {"ci95_halfwidth", r.ci95_halfwidth},
          {"quantiles", {{"0.05", r.q05}, {"0.5", r.q50}, {"0.95", r.q95}}},
          {"criticality", std::move(crit)},
          {"empirical", to_json(r.empirical)}};
}

inline json to_json(const SummaryStats& s) {
  return {{"n", s.n},       {"min", s.min},         {"mode", s.mode},
          {"mean", s.mean}, {"max", s.max},         {"std_dev", s.std_dev},
          {"bandwidth", s.bandwidth}};
}

inline json to_json(const RegressionModel& m) {
  json c = json::object();
  for (std::size_t j = 0; j < 6; ++j) c[std::string(kCoefficientNames[j])] = m.coefficients[j];
  return c;
}

inline json to_json(const RelativeErrorTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json errors = json::object();
    for (std::size_t k = 0; k < t.methods.size(); ++k) {
      errors[t.methods[k]] = row.percent[k] ? json(*row.percent[k]) : json(nullptr);
    }
    rows.push_back({{"activities", row.x1}, {"points", row.x2}, {"percent", std::move(errors)}});
  }
  return {{"methods", t.methods}, {"rows", std::move(rows)}, {"division_by_zero", t.flagged}};
}

struct RegressionReport {
  std::map<std::string, RegressionModel> models;
  std::map<std::string, Correlations> correlations;
  std::map<std::string, std::string> errors;  // per method, when fitting failed
  RelativeErrorTable relative_errors;
};

// Fits and analyses every method present in `records`. Fit or correlation
// failures are reported per method under `errors`.
inline RegressionReport analyze(const std::vector<BenchmarkRecord>& records) {
  RegressionReport rep;
  std::vector<std::string> methods;
  for (const auto& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }
  for (const auto& m : methods) {
    const auto subset = records_for(records, m);
    try {
      rep.models[m] = fit_polynomial(subset);
    } catch (const Error& e) {
      rep.models.erase(m);
      rep.errors[m] = e.what();
    }
    try {
      rep.correlations[m] = correlations(subset);
    } catch (const Error& e) {
      rep.errors.try_emplace(m, e.what());
    }
  }
  rep.relative_errors = makespan::relative_errors(records, rep.models);
  return rep;
}

inline json to_json(const RegressionReport& rep) {
  json coefficients = json::object(), r2 = json::object(), corr = json::object();
  for (const auto& [name, m] : rep.models) {
    coefficients[name] = to_json(m);
    r2[name] = m.r_squared;
  }
  for (const auto& [name, c] : rep.correlations) {
    json values = json::object();
    for (std::size_t j = 0; j < 5; ++j) values[std::string(kRegressorNames[j])] = c.r[j];
    std::vector<std::string> ranking;
    for (std::size_t j : c.ranking) ranking.emplace_back(kRegressorNames[j]);
    corr[name] = {{"pearson", std::move(values)}, {"ranking", std::move(ranking)}};
  }
  json j{{"coefficients", std::move(coefficients)},
         {"r_squared", std::move(r2)},
         {"correlations", std::move(corr)},
         {"relative_errors", to_json(rep.relative_errors)}};
  if (!rep.errors.empty()) j["errors"] = rep.errors;
  return j;
}

// Fitted surfaces sampled on a steps x steps grid over [x1_lo, x1_hi] x
// [x2_lo, x2_hi].
inline std::string surface_csv(const std::map<std::string, RegressionModel>& models, double x1_lo,
                               double x1_hi, double x2_lo, double x2_hi, std::size_t steps) {
  std::string out = "method,x1,x2,y_seconds\n";
  const auto at = [&](double lo, double hi, std::size_t i) {
    return steps < 2 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  };
  for (const auto& [name, m] : models) {
    for (std::size_t i = 0; i < steps; ++i) {
      for (std::size_t k = 0; k < steps; ++k) {
        const double x1 = at(x1_lo, x1_hi, i), x2 = at(x2_lo, x2_hi, k);
        out += name + "," + detail::format_number(x1) + "," + detail::format_number(x2) + "," +
               detail::format_number(evaluate(m, x1, x2)) + "\n";
      }
    }
  }
  return out;
}

}  // namespace makespan
