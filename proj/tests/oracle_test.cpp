#include "makespan/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

namespace makespan {
namespace {

using testing::coin;
using testing::dd;

void expect_same(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.support()[i], b.support()[i], 1e-12);
    EXPECT_NEAR(a.masses()[i], b.masses()[i], 1e-12);
  }
}

void expect_matches(const DiscreteDistribution& d, const std::map<double, double>& oracle) {
  ASSERT_EQ(d.size(), oracle.size());
  std::size_t i = 0;
  for (auto [v, p] : oracle) {
    EXPECT_NEAR(d.support()[i], v, 1e-12);
    EXPECT_NEAR(d.masses()[i], p, 1e-12);
    ++i;
  }
}

TEST(ExactDistribution, Chain) {
  const auto net = testing::chain({DurationSpec::deterministic(2), DurationSpec::deterministic(3)});
  const auto d = exact_distribution(net);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.support()[0], 5);
}

TEST(ExactDistribution, Diamond) {
  const auto d = exact_distribution(testing::diamond(coin(), coin()));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.support()[0], 1);
  EXPECT_DOUBLE_EQ(d.masses()[0], 0.25);
  EXPECT_DOUBLE_EQ(d.masses()[1], 0.75);
}

// makespan = max(sa+at, sb+bt, sa+ab+bt); the bridge path alone decides the
// extremes, giving {3: 1/8, 4: 3/8, 5: 3/8, 6: 1/8}.
TEST(ExactDistribution, Wheatstone) {
  const auto d = exact_distribution(testing::wheatstone());
  expect_same(d, dd({{3, 0.125}, {4, 0.375}, {5, 0.375}, {6, 0.125}}));
  expect_matches(d, testing::brute_force_makespan(testing::wheatstone()));
  EXPECT_DOUBLE_EQ(d.mean(), 4.5);
}

TEST(ExactDistribution, Errors) {
  try {
    exact_distribution(testing::chain({DurationSpec::uniform(0, 1)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_discrete_activity);
  }
  try {
    exact_distribution(testing::wheatstone(), 31);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::outcome_limit_exceeded);
  }
  EXPECT_NO_THROW(exact_distribution(testing::wheatstone(), 32));
}

TEST(ExactDistribution, MatchesPathBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto net = testing::random_small_network(seed);
    expect_matches(exact_distribution(net), testing::brute_force_makespan(net));
  }
}

TEST(ExactDistribution, InvariantUnderArcOrder) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto net = testing::random_small_network(seed);
    auto desc = net.describe();
    Xoshiro256 rng(seed);
    std::shuffle(desc.arcs.begin(), desc.arcs.end(), rng);
    desc.nodes.clear();
    const auto permuted = validate(desc);
    const auto a = exact_distribution(net), b = exact_distribution(permuted);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a.support()[i], b.support()[i]);
      EXPECT_NEAR(a.masses()[i], b.masses()[i], 1e-12);
    }
  }
}

}  // namespace
}  // namespace makespan
