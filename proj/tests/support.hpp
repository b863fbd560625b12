#pragma once

// Shared fixtures for the unit and acceptance suites: small hand-built
// networks, random small explicit-discrete networks, and a path-based
// brute-force makespan oracle that does not share code with the library's
// longest-path DP.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "makespan/dist.hpp"
#include "makespan/network.hpp"
#include "makespan/rng.hpp"

namespace makespan::testing {

inline DiscreteDistribution dd(std::vector<std::pair<double, double>> atoms) {
  std::vector<double> s, m;
  for (auto [v, p] : atoms) {
    s.push_back(v);
    m.push_back(p);
  }
  return DiscreteDistribution(std::move(s), std::move(m));
}

inline DurationSpec ex(std::vector<std::pair<double, double>> atoms) {
  return DurationSpec::explicit_discrete(dd(std::move(atoms)));
}

inline const DurationSpec& coin() {
  static const DurationSpec c = ex({{1, 0.5}, {2, 0.5}});
  return c;
}

struct Builder {
  NetworkDescription desc;
  Builder& arc(std::string tail, std::string head, DurationSpec d) {
    desc.arcs.push_back(
        {std::move(tail), std::move(head), "a" + std::to_string(desc.arcs.size() + 1), std::move(d)});
    return *this;
  }
  ActivityNetwork build() const { return validate(desc); }
};

inline ActivityNetwork chain(std::vector<DurationSpec> durations) {
  Builder b;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    const std::string tail = i == 0 ? "s" : "v" + std::to_string(i);
    const std::string head = i + 1 == durations.size() ? "t" : "v" + std::to_string(i + 1);
    b.arc(tail, head, durations[i]);
  }
  return b.build();
}

inline ActivityNetwork diamond(const DurationSpec& upper, const DurationSpec& lower) {
  return Builder{}
      .arc("s", "a", upper)
      .arc("a", "t", DurationSpec::deterministic(0))
      .arc("s", "b", lower)
      .arc("b", "t", DurationSpec::deterministic(0))
      .build();
}

// s->a, s->b, a->b (bridge), a->t, b->t.
inline ActivityNetwork wheatstone(const DurationSpec& d = coin()) {
  return Builder{}
      .arc("s", "a", d)
      .arc("s", "b", d)
      .arc("a", "b", d)
      .arc("a", "t", d)
      .arc("b", "t", d)
      .build();
}

inline DurationSpec random_explicit(Xoshiro256& rng, std::size_t max_points = 3) {
  const std::size_t k = 2 + rng.below(max_points - 1);
  std::vector<std::pair<double, double>> atoms;
  double v = static_cast<double>(rng.below(3));
  double total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = static_cast<double>(1 + rng.below(5));
    atoms.emplace_back(v, w);
    total += w;
    v += static_cast<double>(1 + rng.below(3));
  }
  for (auto& a : atoms) a.second /= total;
  std::vector<Atom> list;
  for (auto [x, p] : atoms) list.push_back({x, p});
  return DurationSpec::explicit_discrete(DiscreteDistribution::from_atoms(list));
}

// Random small network (<= max_arcs arcs) with 2-3 point explicit supports.
inline ActivityNetwork random_small_network(std::uint64_t seed, std::size_t max_arcs = 8) {
  Xoshiro256 rng(seed, 99);
  const std::size_t arcs = 1 + rng.below(max_arcs);
  const std::size_t layers = 1 + rng.below(std::min<std::size_t>(3, arcs));
  GeneratorParams p;
  p.activity_count = arcs;
  p.layer_count = layers;
  p.family = Family::explicit_discrete;
  p.seed = seed;
  p.support_points = 3;
  return generate_random(p);
}

// Random series-parallel two-terminal network built by recursive series or
// parallel composition; at most max_arcs arcs.
inline ActivityNetwork random_series_parallel(std::uint64_t seed, std::size_t max_arcs = 6) {
  Xoshiro256 rng(seed, 7);
  Builder b;
  std::size_t next_node = 0;
  const auto fresh = [&] { return "n" + std::to_string(next_node++); };
  std::function<void(const std::string&, const std::string&, std::size_t)> build =
      [&](const std::string& from, const std::string& to, std::size_t budget) {
        if (budget == 1) {
          b.arc(from, to, random_explicit(rng));
          return;
        }
        const std::size_t left = 1 + rng.below(budget - 1);
        if (rng.below(2) == 0) {
          const std::string mid = fresh();
          build(from, mid, left);
          build(mid, to, budget - left);
        } else {
          build(from, to, left);
          build(from, to, budget - left);
        }
      };
  const std::size_t total = 1 + rng.below(max_arcs);
  build("s", "t", total);
  return b.build();
}

// All s-t paths by plain DFS, each as a list of arc indices.
inline std::vector<std::vector<std::size_t>> all_paths_dfs(const ActivityNetwork& net) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current;
  std::function<void(std::size_t)> walk = [&](std::size_t v) {
    if (v == net.sink()) {
      out.push_back(current);
      return;
    }
    for (std::size_t a : net.out_arcs(v)) {
      current.push_back(a);
      walk(net.arc(a).head);
      current.pop_back();
    }
  };
  walk(net.source());
  return out;
}

// Exact makespan distribution as max over explicit paths of the path sums,
// enumerated recursively over activities.
inline std::map<double, double> brute_force_makespan(const ActivityNetwork& net) {
  const auto paths = all_paths_dfs(net);
  std::vector<DiscreteDistribution> dists;
  for (const auto& a : net.arcs()) {
    if (const auto* e = std::get_if<ExplicitDiscrete>(&a.duration.params())) {
      dists.push_back(e->distribution);
    } else if (const auto* d = std::get_if<Deterministic>(&a.duration.params())) {
      dists.push_back(DiscreteDistribution::point_mass(d->value));
    } else {
      throw std::runtime_error("brute force needs discrete durations");
    }
  }
  std::map<double, double> result;
  std::vector<double> sample(dists.size());
  std::function<void(std::size_t, double)> rec = [&](std::size_t k, double prob) {
    if (k == dists.size()) {
      double best = 0;
      for (const auto& p : paths) {
        double len = 0;
        for (std::size_t a : p) len += sample[a];
        best = std::max(best, len);
      }
      result[best] += prob;
      return;
    }
    for (std::size_t i = 0; i < dists[k].size(); ++i) {
      sample[k] = dists[k].support()[i];
      rec(k + 1, prob * dists[k].masses()[i]);
    }
  };
  rec(0, 1.0);
  return result;
}

inline double cdf_of(const std::map<double, double>& dist, double t) {
  double c = 0;
  for (auto [v, p] : dist) {
    if (v <= t + 1e-12 * std::max(1.0, std::abs(t))) c += p;
  }
  return c;
}

inline double mean_of(const std::map<double, double>& dist) {
  double m = 0;
  for (auto [v, p] : dist) m += v * p;
  return m;
}

inline std::vector<double> union_support(const DiscreteDistribution& a,
                                         const DiscreteDistribution& b) {
  std::vector<double> t(a.support().begin(), a.support().end());
  t.insert(t.end(), b.support().begin(), b.support().end());
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace makespan::testing
