#pragma once

// Activity-on-arc project networks: nodes are events, arcs are activities.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "makespan/dist.hpp"
#include "makespan/error.hpp"
#include "makespan/rng.hpp"

namespace makespan {

struct Activity {
  std::size_t tail;
  std::size_t head;
  std::string id;
  DurationSpec duration;
};

// Unvalidated network as read from a file or assembled by hand. Node names
// are taken from `nodes` first, then from arc endpoints in order of first use.
struct NetworkDescription {
  struct Arc {
    std::string tail;
    std::string head;
    std::string id;
    DurationSpec duration;
  };
  std::vector<std::string> nodes;
  std::vector<Arc> arcs;
  std::optional<std::string> source;
  std::optional<std::string> sink;
};

class ActivityNetwork;
ActivityNetwork validate(const NetworkDescription& raw);

// Validated two-terminal acyclic network. Only `validate` constructs one.
class ActivityNetwork {
 public:
  std::size_t node_count() const noexcept { return names_.size(); }
  std::size_t arc_count() const noexcept { return arcs_.size(); }
  std::size_t source() const noexcept { return source_; }
  std::size_t sink() const noexcept { return sink_; }
  const std::string& node_name(std::size_t v) const { return names_.at(v); }
  const std::vector<std::string>& node_names() const noexcept { return names_; }
  const std::vector<Activity>& arcs() const noexcept { return arcs_; }
  const Activity& arc(std::size_t a) const { return arcs_.at(a); }
  const std::vector<std::size_t>& out_arcs(std::size_t v) const { return out_.at(v); }
  const std::vector<std::size_t>& in_arcs(std::size_t v) const { return in_.at(v); }
  // Nodes ordered so that every arc points forward; source first, sink last.
  const std::vector<std::size_t>& topological_order() const noexcept { return order_; }

  std::size_t max_out_degree() const noexcept {
    std::size_t best = 0;
    for (const auto& out : out_) best = std::max(best, out.size());
    return best;
  }

  double expected_duration(std::size_t a) const { return arcs_.at(a).duration.mean(); }

  NetworkDescription describe() const {
    NetworkDescription d;
    d.nodes = names_;
    for (const Activity& a : arcs_) {
      d.arcs.push_back({names_[a.tail], names_[a.head], a.id, a.duration});
    }
    d.source = names_[source_];
    d.sink = names_[sink_];
    return d;
  }

 private:
  friend ActivityNetwork validate(const NetworkDescription& raw);
  ActivityNetwork() = default;

  std::vector<std::string> names_;
  std::vector<Activity> arcs_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> order_;
  std::size_t source_ = 0;
  std::size_t sink_ = 0;
};

namespace detail {

inline std::string join_names(const std::vector<std::string>& names,
                              const std::vector<std::size_t>& ids, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += sep;
    out += names[ids[i]];
  }
  return out;
}

// Iterative DFS; returns a node cycle (first node repeated at the end) if any.
inline std::optional<std::vector<std::size_t>> find_cycle(
    std::size_t n, const std::vector<std::vector<std::size_t>>& out,
    const std::vector<Activity>& arcs) {
  enum : std::uint8_t { white, grey, black };
  std::vector<std::uint8_t> color(n, white);
  std::vector<std::size_t> parent(n, n);
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != white) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next == out[v].size()) {
        color[v] = black;
        stack.pop_back();
        continue;
      }
      const std::size_t w = arcs[out[v][next++]].head;
      if (color[w] == grey) {
        std::vector<std::size_t> cycle{w};
        for (std::size_t u = v; u != w; u = parent[u]) cycle.push_back(u);
        cycle.push_back(w);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (color[w] == white) {
        color[w] = grey;
        parent[w] = v;
        stack.emplace_back(w, 0);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline ActivityNetwork validate(const NetworkDescription& raw) {
  if (raw.arcs.empty()) throw Error(Errc::empty_network, "network has no activities");

  ActivityNetwork net;
  std::unordered_map<std::string, std::size_t> index;
  const auto intern = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, net.names_.size());
    if (inserted) net.names_.push_back(name);
    return it->second;
  };
  for (const auto& name : raw.nodes) {
    if (index.count(name)) {
      throw Error(Errc::malformed_file, "node '" + name + "' listed twice");
    }
    intern(name);
  }
  const bool closed_node_set = !raw.nodes.empty();
  std::set<std::string> ids;
  for (const auto& arc : raw.arcs) {
    if (!ids.insert(arc.id).second) {
      throw Error(Errc::duplicate_activity_id, "activity id '" + arc.id + "' is not unique");
    }
    for (const auto* end : {&arc.tail, &arc.head}) {
      if (closed_node_set && !index.count(*end)) {
        throw Error(Errc::unknown_node,
                    "activity '" + arc.id + "' references undeclared node '" + *end + "'");
      }
    }
    const std::size_t tail = intern(arc.tail);
    const std::size_t head = intern(arc.head);
    net.arcs_.push_back({tail, head, arc.id, arc.duration});
  }

  const std::size_t n = net.names_.size();
  net.out_.assign(n, {});
  net.in_.assign(n, {});
  for (std::size_t a = 0; a < net.arcs_.size(); ++a) {
    net.out_[net.arcs_[a].tail].push_back(a);
    net.in_[net.arcs_[a].head].push_back(a);
  }

  for (std::size_t v = 0; v < n; ++v) {
    if (net.in_[v].empty() && net.out_[v].empty()) {
      throw Error(Errc::disconnected_node, "node '" + net.names_[v] + "' has no activities");
    }
  }
  if (auto cycle = detail::find_cycle(n, net.out_, net.arcs_)) {
    throw Error(Errc::cycle_detected,
                "cycle " + detail::join_names(net.names_, *cycle, " -> "));
  }

  std::vector<std::size_t> sources, sinks;
  for (std::size_t v = 0; v < n; ++v) {
    if (net.in_[v].empty()) sources.push_back(v);
    if (net.out_[v].empty()) sinks.push_back(v);
  }
  if (sources.size() != 1) {
    throw Error(Errc::multiple_sources,
                "nodes without predecessors: " + detail::join_names(net.names_, sources, ", "));
  }
  if (sinks.size() != 1) {
    throw Error(Errc::multiple_sinks,
                "nodes without successors: " + detail::join_names(net.names_, sinks, ", "));
  }
  net.source_ = sources.front();
  net.sink_ = sinks.front();
  if (raw.source && *raw.source != net.names_[net.source_]) {
    throw Error(Errc::multiple_sources, "declared source '" + *raw.source +
                                            "' differs from the only node without predecessors '" +
                                            net.names_[net.source_] + "'");
  }
  if (raw.sink && *raw.sink != net.names_[net.sink_]) {
    throw Error(Errc::multiple_sinks, "declared sink '" + *raw.sink +
                                          "' differs from the only node without successors '" +
                                          net.names_[net.sink_] + "'");
  }

  // Kahn's algorithm, smallest node index first for a reproducible order.
  // With one source, one sink and no cycle every node lies on an s-t path.
  std::vector<std::size_t> indegree(n);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = net.in_[v].size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  ready.push(net.source_);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    net.order_.push_back(v);
    for (std::size_t a : net.out_[v]) {
      if (--indegree[net.arcs_[a].head] == 0) ready.push(net.arcs_[a].head);
    }
  }
  return net;
}

inline std::vector<std::size_t> topological_order(const ActivityNetwork& net) {
  return net.topological_order();
}

// Number of distinct s-t paths, saturating at uint64 max.
inline std::uint64_t count_paths(const ActivityNetwork& net) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> count(net.node_count(), 0);
  count[net.source()] = 1;
  for (std::size_t v : net.topological_order()) {
    for (std::size_t a : net.out_arcs(v)) {
      auto& c = count[net.arc(a).head];
      c = (kMax - c < count[v]) ? kMax : c + count[v];
    }
  }
  return count[net.sink()];
}

struct Path {
  std::vector<std::size_t> arcs;  // indices into net.arcs(), in traversal order
  double expected_length = 0.0;
};

struct PathSet {
  std::vector<Path> paths;
  bool truncated = false;
};

inline constexpr std::size_t kDefaultPathCap = 10'000;

// s-t paths in non-increasing order of expected length. Best-first search
// guided by the exact longest expected distance to the sink, so stopping at
// `cap` keeps exactly the `cap` longest paths.
inline PathSet enumerate_paths(const ActivityNetwork& net, std::size_t cap = kDefaultPathCap) {
  const auto& order = net.topological_order();
  std::vector<double> to_sink(net.node_count(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    double best = 0.0;
    for (std::size_t a : net.out_arcs(*it)) {
      best = std::max(best, net.expected_duration(a) + to_sink[net.arc(a).head]);
    }
    to_sink[*it] = best;
  }

  struct Partial {
    std::size_t node;
    std::size_t via_arc;
    std::size_t parent;  // index into `tree`, npos for the root
    double length;
  };
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::vector<Partial> tree{{net.source(), npos, npos, 0.0}};
  // (priority, sequence, tree index); ties resolved by insertion sequence.
  using Entry = std::tuple<double, std::uint64_t, std::size_t>;
  const auto cmp = [](const Entry& l, const Entry& r) {
    if (std::get<0>(l) != std::get<0>(r)) return std::get<0>(l) < std::get<0>(r);
    return std::get<1>(l) > std::get<1>(r);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);
  std::uint64_t sequence = 0;
  frontier.emplace(to_sink[net.source()], sequence++, 0);

  PathSet result;
  while (!frontier.empty()) {
    if (result.paths.size() == cap) {
      result.truncated = true;
      break;
    }
    const auto [priority, seq, idx] = frontier.top();
    frontier.pop();
    const Partial cur = tree[idx];
    if (cur.node == net.sink()) {
      Path p;
      p.expected_length = cur.length;
      for (std::size_t k = idx; tree[k].parent != npos; k = tree[k].parent) {
        p.arcs.push_back(tree[k].via_arc);
      }
      std::reverse(p.arcs.begin(), p.arcs.end());
      result.paths.push_back(std::move(p));
      continue;
    }
    for (std::size_t a : net.out_arcs(cur.node)) {
      const std::size_t head = net.arc(a).head;
      const double length = cur.length + net.expected_duration(a);
      tree.push_back({head, a, idx, length});
      frontier.emplace(length + to_sink[head], sequence++, tree.size() - 1);
    }
  }
  return result;
}

// Greedy family of pairwise arc-disjoint paths: repeatedly remove the longest
// (by expected length) path that uses only unclaimed arcs. Paths may start
// and end at any node, so later picks are often partial paths.
inline std::vector<Path> disjoint_paths(const ActivityNetwork& net) {
  std::vector<bool> used(net.arc_count(), false);
  std::size_t remaining = net.arc_count();
  std::vector<Path> paths;
  const auto& order = net.topological_order();
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::vector<double> best(net.node_count());
  std::vector<std::size_t> via(net.node_count());
  while (remaining > 0) {
    std::fill(best.begin(), best.end(), 0.0);
    std::fill(via.begin(), via.end(), npos);
    std::size_t end = npos;
    for (std::size_t v : order) {
      for (std::size_t a : net.in_arcs(v)) {
        if (used[a]) continue;
        const double len = best[net.arc(a).tail] + net.expected_duration(a);
        if (via[v] == npos || len > best[v]) {
          best[v] = len;
          via[v] = a;
        }
      }
      // ties go to the later node so zero-length arcs still get claimed
      if (via[v] != npos && (end == npos || best[v] >= best[end])) end = v;
    }
    Path p;
    p.expected_length = best[end];
    for (std::size_t v = end; via[v] != npos;) {
      const std::size_t a = via[v];
      p.arcs.push_back(a);
      v = net.arc(a).tail;
    }
    std::reverse(p.arcs.begin(), p.arcs.end());
    for (std::size_t a : p.arcs) {
      used[a] = true;
      --remaining;
    }
    paths.push_back(std::move(p));
  }
  return paths;
}

struct GeneratorParams {
  std::size_t activity_count = 20;
  std::size_t layer_count = 3;
  Family family = Family::triangular;
  std::uint64_t seed = 1;
  // Atoms per activity for the explicit-discrete family (at least 2).
  std::size_t support_points = 3;
};

namespace detail {

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

inline DurationSpec random_duration(Family family, std::size_t support_points, Xoshiro256& rng) {
  switch (family) {
    case Family::deterministic:
      return DurationSpec::deterministic(static_cast<double>(1 + rng.below(10)));
    case Family::uniform: {
      const double lo = round2(rng.uniform(0.0, 5.0));
      return DurationSpec::uniform(lo, lo + round2(rng.uniform(1.0, 10.0)));
    }
    case Family::triangular:
    case Family::beta_three_point: {
      const double lo = round2(rng.uniform(1.0, 5.0));
      const double mode = lo + round2(rng.uniform(0.0, 5.0));
      const double hi = mode + round2(rng.uniform(1.0, 10.0));
      return family == Family::triangular ? DurationSpec::triangular(lo, mode, hi)
                                          : DurationSpec::beta_three_point(lo, mode, hi);
    }
    case Family::normal:
      return DurationSpec::normal(round2(rng.uniform(5.0, 15.0)), round2(rng.uniform(0.5, 3.0)));
    case Family::exponential:
      return DurationSpec::exponential(round2(rng.uniform(1.0, 10.0)));
    case Family::explicit_discrete: {
      const std::size_t k = 2 + rng.below(std::max<std::size_t>(support_points, 2) - 1);
      std::vector<double> values(10);
      std::iota(values.begin(), values.end(), 0.0);
      for (std::size_t i = 0; i < k; ++i) {  // partial Fisher-Yates
        std::swap(values[i], values[i + rng.below(values.size() - i)]);
      }
      values.resize(k);
      std::sort(values.begin(), values.end());
      std::vector<double> weights(k);
      double total = 0.0;
      for (double& w : weights) total += (w = static_cast<double>(1 + rng.below(9)));
      for (double& w : weights) w /= total;
      return DurationSpec::explicit_discrete(
          DiscreteDistribution::from_atoms([&] {
            std::vector<Atom> atoms;
            for (std::size_t i = 0; i < k; ++i) atoms.push_back({values[i], weights[i]});
            return atoms;
          }()));
    }
  }
  return DurationSpec::deterministic(1.0);
}

}  // namespace detail

// Layered random network with exactly `activity_count` arcs. Internal nodes
// sit in min(layer_count, activity_count - 1) layers of equal width w; a
// spanning skeleton gives every node a predecessor in the previous layer and
// a successor in the next, then forward arcs (possibly skipping layers, and
// parallel only once all distinct pairs are taken) fill up the count.
inline ActivityNetwork generate_random(const GeneratorParams& params) {
  if (params.activity_count < 1 || params.layer_count < 1) {
    throw Error(Errc::infeasible_params, "activity and layer counts must be >= 1");
  }
  if (params.activity_count < params.layer_count) {
    throw Error(Errc::infeasible_params, "activity count below layer count");
  }
  Xoshiro256 rng(params.seed, 0x6e6574776f726bULL);
  const std::size_t target = params.activity_count;
  const std::size_t layers = std::min(params.layer_count, target - 1);

  // level 0 = source, levels 1..layers internal, level layers+1 = sink
  std::vector<std::vector<std::string>> level(layers + 2);
  level.front().push_back("s");
  level.back().push_back("t");
  const std::size_t width = layers == 0 ? 0 : std::max<std::size_t>(1, target / (2 * layers));
  for (std::size_t l = 1; l <= layers; ++l) {
    for (std::size_t k = 0; k < width; ++k) {
      level[l].push_back("n" + std::to_string(l) + "_" + std::to_string(k));
    }
  }

  std::set<std::pair<std::string, std::string>> present;
  NetworkDescription desc;
  const auto add = [&](const std::string& tail, const std::string& head) {
    present.emplace(tail, head);
    desc.arcs.push_back({tail, head, "", detail::random_duration(params.family,
                                                                 params.support_points, rng)});
  };

  std::vector<std::vector<bool>> has_out(layers + 2);
  for (std::size_t l = 0; l < layers + 2; ++l) has_out[l].assign(level[l].size(), false);
  for (std::size_t l = 1; l <= layers + 1; ++l) {
    for (std::size_t k = 0; k < level[l].size(); ++k) {
      const std::size_t from = rng.below(level[l - 1].size());
      add(level[l - 1][from], level[l][k]);
      has_out[l - 1][from] = true;
    }
    for (std::size_t k = 0; k < level[l - 1].size(); ++k) {
      if (!has_out[l - 1][k]) {
        add(level[l - 1][k], level[l][rng.below(level[l].size())]);
        has_out[l - 1][k] = true;
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> nodes_by_level;
  for (std::size_t l = 0; l < layers + 2; ++l) {
    for (std::size_t k = 0; k < level[l].size(); ++k) nodes_by_level.emplace_back(l, k);
  }
  while (desc.arcs.size() < target) {
    std::string tail, head;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const auto [lu, ku] = nodes_by_level[rng.below(nodes_by_level.size() - 1)];
      std::size_t lv, kv;
      do {
        std::tie(lv, kv) = nodes_by_level[rng.below(nodes_by_level.size())];
      } while (lv <= lu);
      tail = level[lu][ku];
      head = level[lv][kv];
      if (!present.count({tail, head})) break;
    }
    add(tail, head);
  }

  for (std::size_t i = 0; i < desc.arcs.size(); ++i) desc.arcs[i].id = "A" + std::to_string(i + 1);
  for (const auto& lv : level) {
    for (const auto& name : lv) desc.nodes.push_back(name);
  }
  desc.source = "s";
  desc.sink = "t";
  return validate(desc);
}

}  // namespace makespan
