#include "makespan/network.hpp"

#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

namespace makespan {
namespace {

using testing::Builder;

Errc validation_error(const Builder& b) {
  try {
    b.build();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a validation error";
  return Errc::io_error;
}

const DurationSpec one = DurationSpec::deterministic(1);

TEST(Validate, SimpleChain) {
  const auto net = Builder{}.arc("s", "m", one).arc("m", "t", one).build();
  EXPECT_EQ(net.arc_count(), 2u);
  EXPECT_EQ(net.node_name(net.source()), "s");
  EXPECT_EQ(net.node_name(net.sink()), "t");
}

TEST(Validate, Diagnostics) {
  EXPECT_EQ(validation_error(Builder{}.arc("s", "m", one).arc("m", "s", one)), Errc::cycle_detected);
  EXPECT_EQ(validation_error(Builder{}.arc("s", "t", one).arc("u", "t", one)),
            Errc::multiple_sources);
  EXPECT_EQ(validation_error(Builder{}.arc("s", "a", one).arc("s", "b", one)), Errc::multiple_sinks);
  EXPECT_EQ(validation_error(Builder{}), Errc::empty_network);

  Builder dup;
  dup.arc("s", "m", one).arc("m", "t", one);
  dup.desc.arcs[1].id = dup.desc.arcs[0].id;
  EXPECT_EQ(validation_error(dup), Errc::duplicate_activity_id);

  Builder isolated;
  isolated.arc("s", "t", one);
  isolated.desc.nodes = {"s", "t", "x"};
  EXPECT_EQ(validation_error(isolated), Errc::disconnected_node);
}

TEST(Validate, CycleWitnessNamesTheCycle) {
  try {
    Builder{}.arc("s", "a", one).arc("a", "b", one).arc("b", "a", one).arc("b", "t", one).build();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::cycle_detected);
    EXPECT_NE(e.detail().find("a -> b -> a"), std::string::npos) << e.detail();
  }
}

TEST(TopologicalOrder, ChainAndDiamond) {
  const auto chain = testing::chain({one, one});
  const auto order = topological_order(chain);
  ASSERT_EQ(order.size(), 3u);
  EXPECT_EQ(chain.node_name(order[0]), "s");
  EXPECT_EQ(chain.node_name(order[1]), "v1");
  EXPECT_EQ(chain.node_name(order[2]), "t");

  const auto d = testing::diamond(one, one);
  const auto o = topological_order(d);
  EXPECT_EQ(o.front(), d.source());
  EXPECT_EQ(o.back(), d.sink());
  EXPECT_EQ(o.size(), d.node_count());
}

ActivityNetwork diamonds_in_series(std::size_t k) {
  Builder b;
  for (std::size_t i = 0; i < k; ++i) {
    const std::string from = i == 0 ? "s" : "j" + std::to_string(i);
    const std::string to = i + 1 == k ? "t" : "j" + std::to_string(i + 1);
    const std::string up = "u" + std::to_string(i), lo = "l" + std::to_string(i);
    b.arc(from, up, DurationSpec::deterministic(static_cast<double>(i + 1)))
        .arc(up, to, one)
        .arc(from, lo, one)
        .arc(lo, to, one);
  }
  return b.build();
}

TEST(EnumeratePaths, Counts) {
  EXPECT_EQ(enumerate_paths(testing::chain({one, one, one})).paths.size(), 1u);
  EXPECT_EQ(enumerate_paths(testing::diamond(one, one)).paths.size(), 2u);

  const auto net = diamonds_in_series(5);
  const auto all = enumerate_paths(net);
  EXPECT_EQ(all.paths.size(), 32u);
  EXPECT_FALSE(all.truncated);
  EXPECT_EQ(count_paths(net), 32u);

  const auto capped = enumerate_paths(net, 10);
  EXPECT_EQ(capped.paths.size(), 10u);
  EXPECT_TRUE(capped.truncated);
}

TEST(EnumeratePaths, DescendingAndKeepsTheLongest) {
  const auto net = diamonds_in_series(5);
  const auto all = enumerate_paths(net);
  for (std::size_t i = 1; i < all.paths.size(); ++i) {
    EXPECT_GE(all.paths[i - 1].expected_length, all.paths[i].expected_length);
  }
  // Oracle: DFS enumeration, sorted by expected length.
  auto dfs = testing::all_paths_dfs(net);
  std::vector<double> lengths;
  for (const auto& p : dfs) {
    double len = 0;
    for (std::size_t a : p) len += net.expected_duration(a);
    lengths.push_back(len);
  }
  std::sort(lengths.rbegin(), lengths.rend());
  const auto capped = enumerate_paths(net, 7);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_DOUBLE_EQ(capped.paths[i].expected_length, lengths[i]);
  }
  for (const auto& p : all.paths) {
    EXPECT_EQ(net.arc(p.arcs.front()).tail, net.source());
    EXPECT_EQ(net.arc(p.arcs.back()).head, net.sink());
    for (std::size_t i = 1; i < p.arcs.size(); ++i) {
      EXPECT_EQ(net.arc(p.arcs[i - 1]).head, net.arc(p.arcs[i]).tail);
    }
  }
}

TEST(DisjointPaths, DiamondAndChain) {
  const auto d = testing::diamond(DurationSpec::deterministic(5), DurationSpec::deterministic(4));
  const auto paths = disjoint_paths(d);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_DOUBLE_EQ(paths[0].expected_length, 5);
  EXPECT_DOUBLE_EQ(paths[1].expected_length, 4);

  const auto c = testing::chain({one, one, one});
  const auto single = disjoint_paths(c);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].arcs.size(), 3u);
}

// Wheatstone with heavy s->a->t: the greedy takes s-a-t, then s-b-t, then the
// bridge on its own.
TEST(DisjointPaths, WheatstoneGreedy) {
  const auto det = [](double x) { return DurationSpec::deterministic(x); };
  const auto net = Builder{}
                       .arc("s", "a", det(3))
                       .arc("s", "b", det(1.2))
                       .arc("a", "b", det(1))
                       .arc("a", "t", det(3))
                       .arc("b", "t", det(1.5))
                       .build();
  const auto paths = disjoint_paths(net);
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_EQ(paths[0].arcs, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(paths[1].arcs, (std::vector<std::size_t>{1, 4}));
  EXPECT_EQ(paths[2].arcs, (std::vector<std::size_t>{2}));
  EXPECT_EQ(paths[0].arcs.size() + paths[1].arcs.size(), 4u);

  // Oracle: the first greedy pick is the longest of all (partial) paths,
  // found here by enumerating every contiguous sub-path of every s-t path.
  double longest = 0;
  for (const auto& p : testing::all_paths_dfs(net)) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      double len = 0;
      for (std::size_t j = i; j < p.size(); ++j) longest = std::max(longest, len += net.expected_duration(p[j]));
    }
  }
  EXPECT_DOUBLE_EQ(paths[0].expected_length, longest);
}

TEST(GenerateRandom, SmallAndInfeasible) {
  GeneratorParams p;
  p.activity_count = 2;
  p.layer_count = 1;
  const auto net = generate_random(p);
  EXPECT_EQ(net.arc_count(), 2u);

  p.activity_count = 1;
  EXPECT_EQ(generate_random(p).arc_count(), 1u);

  p.activity_count = 2;
  p.layer_count = 3;
  try {
    generate_random(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::infeasible_params);
  }
}

TEST(GenerateRandom, DeterministicForSeed) {
  GeneratorParams p;
  p.activity_count = 60;
  p.layer_count = 4;
  p.seed = 42;
  const auto a = generate_random(p), b = generate_random(p);
  ASSERT_EQ(a.arc_count(), b.arc_count());
  for (std::size_t i = 0; i < a.arc_count(); ++i) {
    EXPECT_EQ(a.arc(i).tail, b.arc(i).tail);
    EXPECT_EQ(a.arc(i).head, b.arc(i).head);
    EXPECT_EQ(a.expected_duration(i), b.expected_duration(i));
  }
  p.seed = 43;
  const auto c = generate_random(p);
  bool differs = false;
  for (std::size_t i = 0; i < c.arc_count(); ++i) {
    differs |= c.expected_duration(i) != a.expected_duration(i);
  }
  EXPECT_TRUE(differs);
}

TEST(GenerateRandom, ExactActivityCount) {
  for (std::size_t n : {300u, 600u, 900u, 1200u}) {
    GeneratorParams p;
    p.activity_count = n;
    p.layer_count = 10;
    EXPECT_EQ(generate_random(p).arc_count(), n);
  }
}

TEST(GenerateRandom, ProducesNonSeriesParallelStructure) {
  GeneratorParams p;
  p.activity_count = 40;
  p.layer_count = 4;
  const auto net = generate_random(p);
  EXPECT_GT(count_paths(net), net.arc_count() / 4);
  EXPECT_GE(net.max_out_degree(), 2u);
}

// 1000 random seeds: generation validates, order respects arcs, path
// enumeration agrees with the DP count, disjoint paths share no arc.
TEST(NetworkProperties, RandomSeeds) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Xoshiro256 rng(seed, 3);
    GeneratorParams p;
    p.activity_count = 1 + rng.below(40);
    p.layer_count = 1 + rng.below(std::min<std::uint64_t>(p.activity_count, 6));
    p.family = static_cast<Family>(rng.below(7));
    p.seed = seed;
    ActivityNetwork net = generate_random(p);
    ASSERT_EQ(net.arc_count(), p.activity_count);

    std::vector<std::size_t> position(net.node_count());
    const auto& order = net.topological_order();
    ASSERT_EQ(order.size(), net.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
    for (const auto& a : net.arcs()) ASSERT_LT(position[a.tail], position[a.head]);

    const auto ps = enumerate_paths(net, 5000);
    if (!ps.truncated) {
      ASSERT_EQ(ps.paths.size(), count_paths(net));
    }

    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& path : disjoint_paths(net)) {
      for (std::size_t a : path.arcs) {
        ASSERT_TRUE(seen.insert(a).second) << "arc reused, seed " << seed;
        ++total;
      }
    }
    ASSERT_EQ(total, net.arc_count());
  }
}

}  // namespace
}  // namespace makespan
