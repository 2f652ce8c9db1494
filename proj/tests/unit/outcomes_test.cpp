// Copyright 2026 The crnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <map>

#include "crn/coopsort.hpp"
#include "crn/error.hpp"
#include "crn/outcomes.hpp"
#include "crn/rng.hpp"
#include "crn_oracles/oracles.hpp"

namespace crn {
namespace {

// Two members over channels 1 and 2 (ids), SU1 = (1,2), SU2 = (2,1).
CoalitionPlan crossed_plan() {
  CoalitionPlan plan;
  plan.members = {0, 1};
  plan.shared_channels = {1, 2};
  plan.orderings = {{1, 2}, {2, 1}};
  return plan;
}

const std::vector<double> kThetas{0.0, 0.8, 0.5};  // indexed by channel id

TEST(TupleProbability, BernoulliSingleton) {
  CoalitionPlan plan;
  plan.members = {0};
  plan.shared_channels = {0};
  plan.orderings = {{0}};
  const std::vector<double> thetas{0.7};
  const std::vector<ChannelId> pick{0};
  const std::vector<ChannelId> idle{kIdle};
  EXPECT_NEAR(tuple_probability(plan, pick, thetas), 0.7, 1e-15);
  EXPECT_NEAR(tuple_probability(plan, idle, thetas), 0.3, 1e-15);
}

TEST(TupleProbability, CrossedOrders) {
  const auto plan = crossed_plan();
  const auto p = [&](ChannelId a, ChannelId b) {
    const std::vector<ChannelId> t{a, b};
    return tuple_probability(plan, t, kThetas);
  };
  EXPECT_NEAR(p(1, 2), 0.4, 1e-15);
  EXPECT_NEAR(p(1, 1), 0.4, 1e-15);
  EXPECT_NEAR(p(2, 2), 0.1, 1e-15);
  EXPECT_EQ(p(2, 1), 0.0);
  EXPECT_NEAR(p(kIdle, kIdle), 0.1, 1e-15);
  EXPECT_EQ(p(kIdle, 1), 0.0);
  EXPECT_EQ(p(1, kIdle), 0.0);
}

TEST(Enumerate, CrossedOrdersStoreFourTuples) {
  const auto dist = enumerate_outcomes(crossed_plan(), kThetas);
  ASSERT_EQ(dist.tuples.size(), 4u);
  double total = 0.0;
  for (const auto& t : dist.tuples) total += t.prob;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Enumerate, SingletonHasOnePerPositionPlusIdle) {
  CoalitionPlan plan;
  plan.members = {0};
  plan.shared_channels = {0, 1, 2, 3};
  plan.orderings = {{2, 0, 3, 1}};
  const std::vector<double> thetas{0.3, 0.4, 0.5, 0.6};
  EXPECT_EQ(enumerate_outcomes(plan, thetas).tuples.size(), 5u);
}

TEST(Enumerate, CertainChannelPrunesTail) {
  CoalitionPlan plan;
  plan.members = {0};
  plan.shared_channels = {0, 1};
  plan.orderings = {{0, 1}};
  const std::vector<double> thetas{1.0, 0.5};
  const auto dist = enumerate_outcomes(plan, thetas);
  ASSERT_EQ(dist.tuples.size(), 1u);
  EXPECT_EQ(dist.tuples[0].assignment, std::vector<ChannelId>{0});
}

TEST(Enumerate, CapCountsStoredTuples) {
  const auto plan = crossed_plan();
  EXPECT_NO_THROW(enumerate_outcomes(plan, kThetas, 4));
  try {
    enumerate_outcomes(plan, kThetas, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::enumeration_limit);
  }
}

TEST(RankGroups, FromAssignments) {
  const auto plan = crossed_plan();
  const std::vector<ChannelId> split{1, 2};
  const std::vector<ChannelId> shared{1, 1};
  const std::vector<ChannelId> idle{kIdle, kIdle};
  EXPECT_EQ(rank_groups(plan, split), (std::vector<std::vector<std::size_t>>{{0, 1}}));
  EXPECT_EQ(rank_groups(plan, shared), (std::vector<std::vector<std::size_t>>{{0}, {1}}));
  EXPECT_TRUE(rank_groups(plan, idle).empty());
}

TEST(Marginals, RowsSumToBusyComplement) {
  const auto dist = enumerate_outcomes(crossed_plan(), kThetas);
  const auto m = transmit_marginals(dist, 3);
  EXPECT_NEAR(m[0][1], 0.8, 1e-15);
  EXPECT_NEAR(m[0][2], 0.1, 1e-15);
  EXPECT_NEAR(m[1][2], 0.5, 1e-15);
  EXPECT_NEAR(m[1][1], 0.4, 1e-15);
  EXPECT_EQ(m[0][0], 0.0);
}

// Property: the enumerated distribution is the pushforward of the 2^K
// availability patterns, tuple by tuple.
TEST(Enumerate, MatchesPatternOracle) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Rng rng(seed, Stream::experiment);
    const std::size_t n = 1 + rng.below(3);
    const std::size_t k = 1 + rng.below(6);
    const auto sc = generate_scenario(n, k, 1 + rng.below(std::min<std::size_t>(k, 3)),
                                      PhysParams{}, seed);
    std::vector<SuId> members(n);
    for (SuId i = 0; i < n; ++i) members[i] = i;
    const auto plan = build_plan(sc, members);
    const auto dist = enumerate_outcomes(plan, sc.thetas());
    auto expected = oracle::outcome_distribution(
        {plan.orderings.begin(), plan.orderings.end()},
        {sc.thetas().begin(), sc.thetas().end()});
    for (const auto& t : dist.tuples) {
      std::vector<std::size_t> key;
      for (ChannelId c : t.assignment) key.push_back(c == kIdle ? oracle::kNone : c);
      ASSERT_TRUE(expected.count(key)) << "seed " << seed;
      ASSERT_NEAR(expected[key], t.prob, 1e-12);
      expected.erase(key);
    }
    for (const auto& [key, p] : expected) ASSERT_LT(p, 1e-15) << "missing outcome, seed " << seed;
  }
}

}  // namespace
}  // namespace crn
