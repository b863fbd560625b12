#pragma once

// Point estimates of the makespan: classic PERT on three-point estimates and
// Monte Carlo simulation with per-activity criticality indices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "makespan/dist.hpp"
#include "makespan/error.hpp"
#include "makespan/network.hpp"
#include "makespan/rng.hpp"

namespace makespan {

struct ThreePoint {
  double optimistic, most_likely, pessimistic;
  double mean() const noexcept { return (optimistic + 4.0 * most_likely + pessimistic) / 6.0; }
  double variance() const noexcept {
    const double s = (pessimistic - optimistic) / 6.0;
    return s * s;
  }
};

// deterministic v -> (v, v, v); uniform [a, b] -> (a, (a+b)/2, b);
// triangular and beta-three-point map their own parameters. Normal,
// exponential and explicit durations carry no three-point estimate.
inline ThreePoint three_point(const Activity& a) {
  const auto& p = a.duration.params();
  if (const auto* d = std::get_if<Deterministic>(&p)) return {d->value, d->value, d->value};
  if (const auto* u = std::get_if<Uniform>(&p)) return {u->min, 0.5 * (u->min + u->max), u->max};
  if (const auto* t = std::get_if<Triangular>(&p)) return {t->min, t->mode, t->max};
  if (const auto* b = std::get_if<BetaThreePoint>(&p)) {
    return {b->optimistic, b->most_likely, b->pessimistic};
  }
  throw Error(Errc::missing_three_point_parameters,
              "activity " + a.id + ": family " + std::string(to_string(a.duration.family())) +
                  " has no optimistic/most-likely/pessimistic values");
}

struct PointEstimate {
  std::string method;
  double mean = 0.0;
  double std_dev = 0.0;
  std::vector<std::size_t> critical_path;  // arc indices, source to sink
};

namespace detail {

// Arc position in lexicographic id order, the tie-breaker for critical arcs.
inline std::vector<std::size_t> id_ranks(const ActivityNetwork& net) {
  std::vector<std::size_t> idx(net.arc_count());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t l, std::size_t r) { return net.arc(l).id < net.arc(r).id; });
  std::vector<std::size_t> rank(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) rank[idx[i]] = i;
  return rank;
}

// Longest path for fixed durations. `via` receives the critical incoming arc
// per node; equal finish times go to the arc with the smaller id.
inline double longest_path(const ActivityNetwork& net, const std::vector<double>& duration,
                           const std::vector<std::size_t>& rank, std::vector<double>& finish,
                           std::vector<std::size_t>& via) {
  for (std::size_t v : net.topological_order()) {
    double best = 0.0;
    std::size_t arc = static_cast<std::size_t>(-1);
    for (std::size_t a : net.in_arcs(v)) {
      const double t = finish[net.arc(a).tail] + duration[a];
      if (arc == static_cast<std::size_t>(-1) || t > best || (t == best && rank[a] < rank[arc])) {
        best = t;
        arc = a;
      }
    }
    finish[v] = best;
    via[v] = arc;
  }
  return finish[net.sink()];
}

}  // namespace detail

inline PointEstimate pert_estimate(const ActivityNetwork& net) {
  std::vector<double> mean(net.arc_count()), var(net.arc_count());
  for (std::size_t a = 0; a < net.arc_count(); ++a) {
    const ThreePoint tp = three_point(net.arc(a));
    mean[a] = tp.mean();
    var[a] = tp.variance();
  }
  std::vector<double> finish(net.node_count());
  std::vector<std::size_t> via(net.node_count());
  const auto rank = detail::id_ranks(net);
  PointEstimate est{"pert", detail::longest_path(net, mean, rank, finish, via), 0.0, {}};
  double total_var = 0.0;
  for (std::size_t v = net.sink(); v != net.source(); v = net.arc(via[v]).tail) {
    est.critical_path.push_back(via[v]);
    total_var += var[via[v]];
  }
  std::reverse(est.critical_path.begin(), est.critical_path.end());
  est.std_dev = std::sqrt(total_var);
  return est;
}

// One draw by inverse transform.
inline double sample(const DurationSpec& spec, Xoshiro256& rng) {
  if (const auto* d = std::get_if<Deterministic>(&spec.params())) return d->value;
  if (const auto* u = std::get_if<Uniform>(&spec.params())) return rng.uniform(u->min, u->max);
  return spec.quantile(rng.open_unit());
}

inline constexpr std::size_t kDefaultReplications = 10'000;

struct McResult {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double ci95_halfwidth = 0.0;
  double q05 = 0.0, q50 = 0.0, q95 = 0.0;
  DiscreteDistribution empirical = DiscreteDistribution::point_mass(0.0);
  std::vector<double> criticality;  // per arc index
};

// Replication i draws from stream (seed, i), so the result does not depend
// on how replications are split across workers. workers = 0 picks the
// hardware concurrency.
inline McResult montecarlo(const ActivityNetwork& net, std::size_t n, std::uint64_t seed,
                           unsigned workers = 0) {
  if (n == 0) throw Error(Errc::invalid_parameters, "replication count must be >= 1");
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  const auto rank = detail::id_ranks(net);
  std::vector<double> makespan(n);
  std::vector<std::vector<std::uint64_t>> critical(workers,
                                                   std::vector<std::uint64_t>(net.arc_count()));

  const auto run_block = [&](unsigned w) {
    const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
    std::vector<double> duration(net.arc_count()), finish(net.node_count());
    std::vector<std::size_t> via(net.node_count());
    auto& counts = critical[w];
    for (std::size_t i = begin; i < end; ++i) {
      Xoshiro256 rng(seed, i);
      for (std::size_t a = 0; a < net.arc_count(); ++a) duration[a] = sample(net.arc(a).duration, rng);
      makespan[i] = detail::longest_path(net, duration, rank, finish, via);
      for (std::size_t v = net.sink(); v != net.source(); v = net.arc(via[v]).tail) ++counts[via[v]];
    }
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
  }

  McResult r;
  r.n = n;
  r.seed = seed;
  double sum = 0.0;
  for (double x : makespan) sum += x;
  r.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double x : makespan) ss += (x - r.mean) * (x - r.mean);
  r.std_dev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  r.ci95_halfwidth = 1.96 * r.std_dev / std::sqrt(static_cast<double>(n));

  std::vector<Atom> atoms;
  atoms.reserve(n);
  for (double x : makespan) atoms.push_back({x, 1.0 / static_cast<double>(n)});
  r.empirical = DiscreteDistribution::from_atoms(std::move(atoms));
  r.q05 = r.empirical.quantile(0.05);
  r.q50 = r.empirical.quantile(0.5);
  r.q95 = r.empirical.quantile(0.95);

  r.criticality.assign(net.arc_count(), 0.0);
  for (std::size_t a = 0; a < net.arc_count(); ++a) {
    std::uint64_t c = 0;
    for (const auto& counts : critical) c += counts[a];
    r.criticality[a] = static_cast<double>(c) / static_cast<double>(n);
  }
  return r;
}

}  // namespace makespan
