#pragma once

// Network files (JSON and CSV arc lists) and distribution exports.
//
// JSON:
//   {"nodes": ["s", "m", "t"], "source": "s", "sink": "t",
//    "arcs": [{"tail": "s", "head": "m", "id": "A1",
//              "duration": {"family": "triangular", "min": 1, "mode": 2, "max": 4}}]}
//
// CSV: header `tail,head,id,family,p1,p2,p3`. Parameters are positional in
// the order used by the JSON keys below; explicit-discrete puts its atoms in
// p1 as `value:mass;value:mass;...`.

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "makespan/dist.hpp"
#include "makespan/error.hpp"
#include "makespan/network.hpp"

namespace makespan {

using json = nlohmann::json;

namespace detail {

// Parameter keys in positional (CSV) order.
inline std::vector<std::string_view> parameter_keys(Family f) {
  switch (f) {
    case Family::deterministic: return {"value"};
    case Family::uniform: return {"min", "max"};
    case Family::triangular: return {"min", "mode", "max"};
    case Family::normal: return {"mean", "std_dev"};
    case Family::exponential: return {"scale"};
    case Family::beta_three_point: return {"optimistic", "most_likely", "pessimistic"};
    case Family::explicit_discrete: return {"support", "masses"};
  }
  return {};
}

inline std::vector<double> positional_parameters(const DurationSpec& spec) {
  return std::visit(
      [](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Deterministic>) return {p.value};
        if constexpr (std::is_same_v<T, Uniform>) return {p.min, p.max};
        if constexpr (std::is_same_v<T, Triangular>) return {p.min, p.mode, p.max};
        if constexpr (std::is_same_v<T, Normal>) return {p.mean, p.std_dev};
        if constexpr (std::is_same_v<T, Exponential>) return {p.scale};
        if constexpr (std::is_same_v<T, BetaThreePoint>)
          return {p.optimistic, p.most_likely, p.pessimistic};
        if constexpr (std::is_same_v<T, ExplicitDiscrete>) return {};
      },
      spec.params());
}

inline DurationSpec make_spec(Family f, const std::vector<double>& p) {
  switch (f) {
    case Family::deterministic: return DurationSpec::deterministic(p.at(0));
    case Family::uniform: return DurationSpec::uniform(p.at(0), p.at(1));
    case Family::triangular: return DurationSpec::triangular(p.at(0), p.at(1), p.at(2));
    case Family::normal: return DurationSpec::normal(p.at(0), p.at(1));
    case Family::exponential: return DurationSpec::exponential(p.at(0));
    case Family::beta_three_point: return DurationSpec::beta_three_point(p.at(0), p.at(1), p.at(2));
    case Family::explicit_discrete: break;
  }
  throw Error(Errc::malformed_file, "explicit-discrete needs atoms, not scalar parameters");
}

[[noreturn]] inline void rethrow_at(const std::string& where, const Error& e) {
  throw Error(e.code(), where + ": " + e.detail());
}

inline std::string format_number(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(x);
}

inline double parse_number(std::string_view text, const std::string& where) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(Errc::malformed_file, where + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& field : out) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
  }
  return out;
}

}  // namespace detail

inline json to_json(const DiscreteDistribution& d) {
  return json{{"support", std::vector<double>(d.support().begin(), d.support().end())},
              {"masses", std::vector<double>(d.masses().begin(), d.masses().end())}};
}

inline DiscreteDistribution distribution_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("support") || !j.contains("masses") ||
      !j["support"].is_array() || !j["masses"].is_array()) {
    throw Error(Errc::malformed_file, where + ": expected {support: [...], masses: [...]}");
  }
  try {
    return DiscreteDistribution(j["support"].get<std::vector<double>>(),
                                j["masses"].get<std::vector<double>>());
  } catch (const Error& e) {
    detail::rethrow_at(where, e);
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_file, where + ": " + e.what());
  }
}

inline json to_json(const DurationSpec& spec) {
  json j{{"family", std::string(to_string(spec.family()))}};
  if (const auto* ex = std::get_if<ExplicitDiscrete>(&spec.params())) {
    j.update(to_json(ex->distribution));
    return j;
  }
  const auto keys = detail::parameter_keys(spec.family());
  const auto values = detail::positional_parameters(spec);
  for (std::size_t i = 0; i < keys.size(); ++i) j[std::string(keys[i])] = values[i];
  return j;
}

inline DurationSpec duration_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    throw Error(Errc::malformed_file, where + ": duration needs a string 'family'");
  }
  const auto name = j["family"].get<std::string>();
  const auto family = parse_family(name);
  if (!family) throw Error(Errc::malformed_file, where + "/family: unknown family '" + name + "'");
  if (*family == Family::explicit_discrete) {
    return DurationSpec::explicit_discrete(distribution_from_json(j, where));
  }
  std::vector<double> params;
  for (auto key : detail::parameter_keys(*family)) {
    const std::string k(key);
    if (!j.contains(k) || !j[k].is_number()) {
      throw Error(Errc::malformed_file, where + ": family '" + name +
                                            "' needs numeric field '" + k + "'");
    }
    params.push_back(j[k].get<double>());
  }
  try {
    return detail::make_spec(*family, params);
  } catch (const Error& e) {
    detail::rethrow_at(where, e);
  }
}

inline json to_json(const NetworkDescription& d) {
  json arcs = json::array();
  for (const auto& a : d.arcs) {
    arcs.push_back({{"tail", a.tail}, {"head", a.head}, {"id", a.id}, {"duration", to_json(a.duration)}});
  }
  json j{{"nodes", d.nodes}, {"arcs", std::move(arcs)}};
  if (d.source) j["source"] = *d.source;
  if (d.sink) j["sink"] = *d.sink;
  return j;
}

inline json to_json(const ActivityNetwork& net) { return to_json(net.describe()); }

inline NetworkDescription description_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::malformed_file, "network must be a JSON object");
  NetworkDescription d;
  const auto string_field = [](const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !(obj[key].is_string() || obj[key].is_number_integer())) {
      throw Error(Errc::malformed_file, where + ": missing string field '" + key + "'");
    }
    return obj[key].is_string() ? obj[key].get<std::string>() : obj[key].dump();
  };
  if (j.contains("nodes")) {
    if (!j["nodes"].is_array()) throw Error(Errc::malformed_file, "/nodes: expected an array");
    for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
      const auto& n = j["nodes"][i];
      if (!(n.is_string() || n.is_number_integer())) {
        throw Error(Errc::malformed_file, "/nodes/" + std::to_string(i) + ": expected a name");
      }
      d.nodes.push_back(n.is_string() ? n.get<std::string>() : n.dump());
    }
  }
  if (!j.contains("arcs") || !j["arcs"].is_array()) {
    throw Error(Errc::malformed_file, "/arcs: expected an array of activities");
  }
  if (j["arcs"].empty()) throw Error(Errc::malformed_file, "/arcs: no activities");
  for (std::size_t i = 0; i < j["arcs"].size(); ++i) {
    const std::string where = "/arcs/" + std::to_string(i);
    const auto& a = j["arcs"][i];
    if (!a.is_object()) throw Error(Errc::malformed_file, where + ": expected an object");
    if (!a.contains("duration")) throw Error(Errc::malformed_file, where + ": missing 'duration'");
    d.arcs.push_back({string_field(a, "tail", where), string_field(a, "head", where),
                      string_field(a, "id", where),
                      duration_from_json(a["duration"], where + "/duration")});
  }
  if (j.contains("source")) d.source = string_field(j, "source", "/");
  if (j.contains("sink")) d.sink = string_field(j, "sink", "/");
  return d;
}

inline ActivityNetwork parse_network_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::malformed_file, std::string("invalid JSON: ") + e.what());
  }
  return validate(description_from_json(j));
}

inline ActivityNetwork parse_network_csv(std::string_view text) {
  NetworkDescription d;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() >= 2 && fields[0] == "tail" && fields[1] == "head") continue;
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() < 5) {
      throw Error(Errc::malformed_file, where + ": expected tail,head,id,family,p1[,p2,p3]");
    }
    const auto family = parse_family(fields[3]);
    if (!family) {
      throw Error(Errc::malformed_file, where + ", field 4: unknown family '" + fields[3] + "'");
    }
    try {
      if (*family == Family::explicit_discrete) {
        std::vector<double> support, masses;
        for (const auto& atom : detail::split(fields[4], ';')) {
          const auto parts = detail::split(atom, ':');
          if (parts.size() != 2) {
            throw Error(Errc::malformed_file, "field 5: atoms must be value:mass");
          }
          support.push_back(detail::parse_number(parts[0], "field 5"));
          masses.push_back(detail::parse_number(parts[1], "field 5"));
        }
        d.arcs.push_back({fields[0], fields[1], fields[2],
                          DurationSpec::explicit_discrete(
                              DiscreteDistribution(std::move(support), std::move(masses)))});
        continue;
      }
      const std::size_t needed = detail::parameter_keys(*family).size();
      std::vector<double> params;
      for (std::size_t k = 0; k < needed; ++k) {
        const std::string field = "field " + std::to_string(5 + k);
        if (4 + k >= fields.size() || fields[4 + k].empty()) {
          throw Error(Errc::malformed_file, field + ": missing parameter");
        }
        params.push_back(detail::parse_number(fields[4 + k], field));
      }
      d.arcs.push_back({fields[0], fields[1], fields[2], detail::make_spec(*family, params)});
    } catch (const Error& e) {
      detail::rethrow_at(where, e);
    }
  }
  if (d.arcs.empty()) throw Error(Errc::malformed_file, "no activities in CSV");
  return validate(d);
}

inline std::string to_csv(const ActivityNetwork& net) {
  std::string out = "tail,head,id,family,p1,p2,p3\n";
  for (const auto& a : net.arcs()) {
    out += net.node_name(a.tail) + "," + net.node_name(a.head) + "," + a.id + "," +
           std::string(to_string(a.duration.family()));
    std::vector<std::string> params;
    if (const auto* ex = std::get_if<ExplicitDiscrete>(&a.duration.params())) {
      std::string atoms;
      for (std::size_t i = 0; i < ex->distribution.size(); ++i) {
        if (i) atoms += ";";
        atoms += detail::format_number(ex->distribution.support()[i]) + ":" +
                 detail::format_number(ex->distribution.masses()[i]);
      }
      params.push_back(atoms);
    } else {
      for (double p : detail::positional_parameters(a.duration)) {
        params.push_back(detail::format_number(p));
      }
    }
    params.resize(3);
    for (const auto& p : params) out += "," + p;
    out += "\n";
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  out << contents;
}

inline bool has_suffix(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Dispatches on extension: `.csv` is an arc list, anything else JSON.
inline ActivityNetwork load_network(const std::string& path) {
  const std::string text = read_file(path);
  return has_suffix(path, ".csv") ? parse_network_csv(text) : parse_network_json(text);
}

// Two-column (value, cumulative-probability) CSV for plotting.
inline std::string cdf_csv(const DiscreteDistribution& d) {
  std::string out = "value,cumulative_probability\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += detail::format_number(d.support()[i]) + "," +
           detail::format_number(d.cumulative()[i]) + "\n";
  }
  return out;
}

}  // namespace makespan
