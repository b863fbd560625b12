#pragma once

// Exact makespan distribution by enumerating every joint outcome of the
// activity durations. Only meant for small discrete networks.

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "makespan/dist.hpp"
#include "makespan/error.hpp"
#include "makespan/network.hpp"

namespace makespan {

inline constexpr std::size_t kDefaultOutcomeLimit = 1'000'000;

inline DiscreteDistribution exact_distribution(const ActivityNetwork& net,
                                               std::size_t outcome_limit = kDefaultOutcomeLimit) {
  std::vector<DiscreteDistribution> dists;
  dists.reserve(net.arc_count());
  double outcomes = 1.0;
  for (const auto& a : net.arcs()) {
    if (const auto* e = std::get_if<ExplicitDiscrete>(&a.duration.params())) {
      dists.push_back(e->distribution);
    } else if (const auto* d = std::get_if<Deterministic>(&a.duration.params())) {
      dists.push_back(DiscreteDistribution::point_mass(d->value));
    } else {
      throw Error(Errc::non_discrete_activity,
                  "activity " + a.id + " has a " + std::string(to_string(a.duration.family())) +
                      " duration");
    }
    outcomes *= static_cast<double>(dists.back().size());
  }
  if (outcomes > static_cast<double>(outcome_limit)) {
    throw Error(Errc::outcome_limit_exceeded, std::to_string(static_cast<long double>(outcomes)) +
                                                  " joint outcomes exceed the limit of " +
                                                  std::to_string(outcome_limit));
  }

  const auto& order = net.topological_order();
  std::vector<std::size_t> digit(dists.size(), 0);
  std::vector<double> finish(net.node_count());
  std::map<double, double> mass;
  for (;;) {
    double p = 1.0;
    for (std::size_t a = 0; a < dists.size(); ++a) p *= dists[a].masses()[digit[a]];
    for (std::size_t v : order) {
      double t = 0.0;
      for (std::size_t a : net.in_arcs(v)) {
        t = std::max(t, finish[net.arc(a).tail] + dists[a].support()[digit[a]]);
      }
      finish[v] = t;
    }
    mass[finish[net.sink()]] += p;

    std::size_t k = 0;
    while (k < digit.size() && ++digit[k] == dists[k].size()) digit[k++] = 0;
    if (k == digit.size()) break;
  }

  std::vector<Atom> atoms;
  atoms.reserve(mass.size());
  for (auto [v, p] : mass) atoms.push_back({v, p});
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

}  // namespace makespan
