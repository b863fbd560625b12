#pragma once

// Interval estimates of the makespan distribution. Every bound here is a
// stochastic bound on the makespan: an upper bound has a CDF pointwise below
// the true CDF (stochastically larger makespan), a lower bound one above it.
//
// Kleindorfer: forward sweep; a node's upper CDF is the product over incoming
//   arcs of conv(F_tail, F_arc), its lower CDF the pointwise minimum.
// Dodin:       series-parallel reduction with arc duplication.
// Spelde:      path based; lower from arc-disjoint paths, upper from all s-t
//   paths treated as independent.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "makespan/dist.hpp"
#include "makespan/error.hpp"
#include "makespan/network.hpp"

namespace makespan {

struct OpCounts {
  std::size_t convolutions = 0;
  std::size_t products = 0;
  std::size_t min_ops = 0;
  std::size_t duplications = 0;

  OpCounts& operator+=(const OpCounts& o) {
    convolutions += o.convolutions;
    products += o.products;
    min_ops += o.min_ops;
    duplications += o.duplications;
    return *this;
  }
};

// One side of a bound together with the work spent on it.
struct BoundSide {
  DiscreteDistribution distribution;
  OpCounts ops;
};

struct MakespanBounds {
  std::string method;
  BoundSide lower;
  BoundSide upper;
  // Spelde only: the upper bound used a capped subset of the s-t paths.
  bool upper_truncated = false;
  std::size_t paths_used = 0;

  OpCounts total_ops() const {
    OpCounts t = lower.ops;
    t += upper.ops;
    return t;
  }
};

namespace detail {

template <typename Combine>
BoundSide kleindorfer_sweep(const ActivityNetwork& net, const DiscretizationConfig& cfg,
                            Rounding rounding, Combine combine, std::size_t OpCounts::*counter) {
  cfg.validate();
  const DiscretizationConfig side = cfg.with(rounding);
  OpCounts ops;
  std::vector<std::optional<DiscreteDistribution>> at(net.node_count());
  std::vector<std::size_t> pending(net.node_count());
  for (std::size_t v = 0; v < net.node_count(); ++v) pending[v] = net.out_arcs(v).size();
  at[net.source()] = DiscreteDistribution::point_mass(0.0);

  for (std::size_t v : net.topological_order()) {
    if (v == net.source()) continue;
    std::optional<DiscreteDistribution> acc;
    for (std::size_t a : net.in_arcs(v)) {
      const std::size_t tail = net.arc(a).tail;
      auto reached = convolve(*at[tail], discretize(net.arc(a).duration, side), side);
      ++ops.convolutions;
      if (--pending[tail] == 0) at[tail].reset();
      if (!acc) {
        acc = std::move(reached);
      } else {
        acc = combine(*acc, reached);
        ++(ops.*counter);
      }
    }
    at[v] = std::move(acc);
  }
  return {std::move(*at[net.sink()]), ops};
}

}  // namespace detail

// Upper bound: CDF product at every merge node, discretization rounded up.
inline BoundSide kleindorfer_upper(const ActivityNetwork& net, const DiscretizationConfig& cfg) {
  return detail::kleindorfer_sweep(
      net, cfg, Rounding::up,
      [](const DiscreteDistribution& a, const DiscreteDistribution& b) { return cdf_product(a, b); },
      &OpCounts::products);
}

// Lower bound: pointwise CDF minimum at every merge node, rounded down.
inline BoundSide kleindorfer_lower(const ActivityNetwork& net, const DiscretizationConfig& cfg) {
  return detail::kleindorfer_sweep(
      net, cfg, Rounding::down,
      [](const DiscreteDistribution& a, const DiscreteDistribution& b) { return cdf_min(a, b); },
      &OpCounts::min_ops);
}

inline MakespanBounds kleindorfer_bounds(const ActivityNetwork& net,
                                         const DiscretizationConfig& cfg) {
  return {"kleindorfer", kleindorfer_lower(net, cfg), kleindorfer_upper(net, cfg), false, 0};
}

struct ReductionStep {
  enum class Kind { series, parallel, duplication };
  Kind kind;
  std::string node;  // reduced or duplicated node; "tail->head" for parallel steps
  std::vector<std::size_t> consumed;  // arc handles; handles < |A| are network arcs
  std::vector<std::size_t> produced;
};

constexpr std::string_view to_string(ReductionStep::Kind k) noexcept {
  switch (k) {
    case ReductionStep::Kind::series: return "series";
    case ReductionStep::Kind::parallel: return "parallel";
    case ReductionStep::Kind::duplication: return "duplication";
  }
  return "series";
}

struct DodinResult {
  DiscreteDistribution distribution;
  std::vector<ReductionStep> trace;
  OpCounts ops;
};

namespace detail {

class ReductionGraph {
 public:
  ReductionGraph(const ActivityNetwork& net, const DiscretizationConfig& cfg)
      : cfg_(cfg.with(Rounding::up)), source_(net.source()), sink_(net.sink()) {
    names_ = net.node_names();
    rank_.resize(net.node_count());
    const auto& order = net.topological_order();
    for (std::size_t i = 0; i < order.size(); ++i) rank_[order[i]] = i;
    out_.resize(net.node_count());
    in_.resize(net.node_count());
    for (const auto& a : net.arcs()) add_arc(a.tail, a.head, discretize(a.duration, cfg_));
    alive_ = arcs_.size();
  }

  DodinResult run() {
    while (alive_ > 1) {
      bool progressed = false;
      for (std::size_t v : nodes_by_rank()) {
        progressed |= reduce_parallel_out(v);
        progressed |= reduce_series(v);
      }
      if (progressed) continue;
      if (!duplicate_first_eligible()) {
        throw Error(Errc::reduction_stuck,
                    std::to_string(alive_) + " arcs remain but no reduction applies");
      }
    }
    const std::size_t last = out_[source_].front();
    return {std::move(*arcs_[last].dist), std::move(trace_), ops_};
  }

 private:
  struct Arc {
    std::size_t tail, head;
    std::optional<DiscreteDistribution> dist;  // empty once consumed
  };

  std::size_t add_arc(std::size_t tail, std::size_t head, DiscreteDistribution d) {
    arcs_.push_back({tail, head, std::move(d)});
    const std::size_t h = arcs_.size() - 1;
    out_[tail].push_back(h);
    in_[head].push_back(h);
    return h;
  }

  void kill(std::size_t h) {
    auto& a = arcs_[h];
    std::erase(out_[a.tail], h);
    std::erase(in_[a.head], h);
    a.dist.reset();
    --alive_;
  }

  std::vector<std::size_t> nodes_by_rank() const {
    std::vector<std::size_t> nodes(names_.size());
    for (std::size_t v = 0; v < nodes.size(); ++v) nodes[v] = v;
    std::stable_sort(nodes.begin(), nodes.end(),
                     [&](std::size_t l, std::size_t r) { return rank_[l] < rank_[r]; });
    return nodes;
  }

  bool reduce_parallel_out(std::size_t u) {
    if (out_[u].size() < 2) return false;
    std::map<std::size_t, std::vector<std::size_t>> by_head;
    for (std::size_t h : out_[u]) by_head[arcs_[h].head].push_back(h);
    bool changed = false;
    for (auto& [head, group] : by_head) {
      if (group.size() < 2) continue;
      DiscreteDistribution acc = *arcs_[group.front()].dist;
      for (std::size_t i = 1; i < group.size(); ++i) {
        acc = cdf_product(acc, *arcs_[group[i]].dist);
        ++ops_.products;
      }
      for (std::size_t h : group) kill(h);
      const std::size_t made = add_arc(u, head, std::move(acc));
      ++alive_;
      trace_.push_back({ReductionStep::Kind::parallel, names_[u] + "->" + names_[head], group, {made}});
      changed = true;
    }
    return changed;
  }

  bool reduce_series(std::size_t v) {
    if (v == source_ || v == sink_ || in_[v].size() != 1 || out_[v].size() != 1) return false;
    const std::size_t first = in_[v].front(), second = out_[v].front();
    auto d = convolve(*arcs_[first].dist, *arcs_[second].dist, cfg_);
    ++ops_.convolutions;
    const std::size_t tail = arcs_[first].tail, head = arcs_[second].head;
    kill(first);
    kill(second);
    const std::size_t made = add_arc(tail, head, std::move(d));
    ++alive_;
    trace_.push_back({ReductionStep::Kind::series, names_[v], {first, second}, {made}});
    return true;
  }

  // First node in topological order with one incoming arc and several
  // outgoing ones (or the mirror case): copy the single arc once per arc on
  // the other side so every copy ends in a series-reducible node.
  bool duplicate_first_eligible() {
    for (std::size_t v : nodes_by_rank()) {
      if (v == source_ || v == sink_) continue;
      const bool fan_out = in_[v].size() == 1 && out_[v].size() > 1;
      const bool fan_in = out_[v].size() == 1 && in_[v].size() > 1;
      if (!fan_out && !fan_in) continue;

      const std::size_t single = fan_out ? in_[v].front() : out_[v].front();
      const std::vector<std::size_t> others = fan_out ? out_[v] : in_[v];
      ReductionStep step{ReductionStep::Kind::duplication, names_[v], {single}, {}};
      for (std::size_t i = 1; i < others.size(); ++i) {
        const std::size_t copy_node = names_.size();
        names_.push_back(names_[v] + "#" + std::to_string(i));
        rank_.push_back(rank_[v]);
        out_.emplace_back();
        in_.emplace_back();
        const std::size_t moved = others[i];
        std::size_t made;
        if (fan_out) {
          std::erase(out_[v], moved);
          arcs_[moved].tail = copy_node;
          out_[copy_node].push_back(moved);
          made = add_arc(arcs_[single].tail, copy_node, *arcs_[single].dist);
        } else {
          std::erase(in_[v], moved);
          arcs_[moved].head = copy_node;
          in_[copy_node].push_back(moved);
          made = add_arc(copy_node, arcs_[single].head, *arcs_[single].dist);
        }
        ++alive_;
        ++ops_.duplications;
        step.produced.push_back(made);
      }
      trace_.push_back(std::move(step));
      return true;
    }
    return false;
  }

  DiscretizationConfig cfg_;
  std::size_t source_, sink_;
  std::vector<std::string> names_;
  std::vector<std::size_t> rank_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> out_, in_;
  std::size_t alive_ = 0;
  std::vector<ReductionStep> trace_;
  OpCounts ops_;
};

}  // namespace detail

// Upper bound by series-parallel reduction; exact (no duplications) on
// series-parallel networks. Discretization is rounded up throughout.
inline DodinResult dodin_upper(const ActivityNetwork& net, const DiscretizationConfig& cfg) {
  cfg.validate();
  return detail::ReductionGraph(net, cfg).run();
}

enum class SpeldeMode { expectation, normal_clt };

constexpr std::string_view to_string(SpeldeMode m) noexcept {
  return m == SpeldeMode::expectation ? "expectation" : "normal-clt";
}

namespace detail {

inline DiscreteDistribution path_normal(const ActivityNetwork& net, const Path& p,
                                        const DiscretizationConfig& cfg) {
  double mean = 0.0, var = 0.0;
  for (std::size_t a : p.arcs) {
    mean += net.arc(a).duration.mean();
    var += net.arc(a).duration.variance();
  }
  if (var <= 0.0) return DiscreteDistribution::point_mass(mean);
  return discretize(DurationSpec::normal(mean, std::sqrt(var)), cfg);
}

// Running CDF product, collapsed in the configured direction once it
// outgrows sp^2 atoms.
inline void accumulate_max(std::optional<DiscreteDistribution>& acc, DiscreteDistribution d,
                           const DiscretizationConfig& cfg, OpCounts& ops) {
  if (!acc) {
    acc = std::move(d);
    return;
  }
  acc = cdf_product(*acc, d);
  ++ops.products;
  if (acc->size() > cfg.sp * cfg.sp) acc = rediscretize(*acc, cfg.sp, cfg.rounding);
}

}  // namespace detail

// `expectation`: lower = point mass at the longest disjoint-path expected
// length (a bound on the mean makespan), upper = CDF product over the
// enumerated paths of their exact (discretized) length distributions.
// `normal-clt`: every path length is normal with summed means and variances;
// lower = product over disjoint paths, upper = product over enumerated paths.
inline MakespanBounds spelde_bounds(const ActivityNetwork& net, const DiscretizationConfig& cfg,
                                    SpeldeMode mode, std::size_t path_cap = kDefaultPathCap) {
  cfg.validate();
  const auto up = cfg.with(Rounding::up), down = cfg.with(Rounding::down);
  OpCounts lower_ops, upper_ops;

  const auto disjoint = disjoint_paths(net);
  std::optional<DiscreteDistribution> lower;
  if (mode == SpeldeMode::expectation) {
    double longest = 0.0;
    for (const auto& p : disjoint) longest = std::max(longest, p.expected_length);
    lower = DiscreteDistribution::point_mass(longest);
  } else {
    for (const auto& p : disjoint) {
      detail::accumulate_max(lower, detail::path_normal(net, p, down), down, lower_ops);
    }
  }

  const PathSet paths = enumerate_paths(net, path_cap);
  std::optional<DiscreteDistribution> upper;
  if (mode == SpeldeMode::expectation) {
    // Prefix trie so shared path prefixes are convolved once; prefixes are
    // kept at sp atoms.
    struct TrieNode {
      std::map<std::size_t, std::size_t> child;
      std::optional<DiscreteDistribution> dist;
    };
    std::vector<TrieNode> trie(1);
    trie[0].dist = DiscreteDistribution::point_mass(0.0);
    std::vector<std::optional<DiscreteDistribution>> arc_dist(net.arc_count());
    for (const auto& p : paths.paths) {
      std::size_t node = 0;
      for (std::size_t a : p.arcs) {
        auto it = trie[node].child.find(a);
        if (it == trie[node].child.end()) {
          if (!arc_dist[a]) arc_dist[a] = discretize(net.arc(a).duration, up);
          auto d = rediscretize(convolve(*trie[node].dist, *arc_dist[a], up), up.sp, Rounding::up);
          ++upper_ops.convolutions;
          trie.push_back({{}, std::move(d)});
          it = trie[node].child.emplace(a, trie.size() - 1).first;
        }
        node = it->second;
      }
      detail::accumulate_max(upper, *trie[node].dist, up, upper_ops);
    }
  } else {
    for (const auto& p : paths.paths) {
      detail::accumulate_max(upper, detail::path_normal(net, p, up), up, upper_ops);
    }
  }

  MakespanBounds b{"spelde-" + std::string(to_string(mode)),
                   {std::move(*lower), lower_ops},
                   {std::move(*upper), upper_ops},
                   paths.truncated,
                   paths.paths.size()};
  return b;
}

}  // namespace makespan
