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

#include <algorithm>
#include <map>

#include "crn/coopsort.hpp"
#include "crn/noncoop.hpp"
#include "crn/rng.hpp"
#include "crn_oracles/oracles.hpp"

namespace crn {
namespace {

WeightFn table(std::vector<std::map<ChannelId, double>> w) {
  return [w = std::move(w)](std::size_t m, ChannelId c) { return w[m].at(c); };
}

TEST(CooperativeSort, ContestedFirstRank) {
  // both want channel a (0); SU 1 weighs it higher, SU 2 falls back to b (1)
  const auto plan = cooperative_sort({1, 2}, {0, 1}, table({{{0, 0.9}, {1, 0.4}}, {{0, 0.8}, {1, 0.6}}}));
  EXPECT_EQ(plan.orderings[0], (std::vector<ChannelId>{0, 1}));
  EXPECT_EQ(plan.orderings[1], (std::vector<ChannelId>{1, 0}));
  EXPECT_TRUE(collision_profile(plan).empty());
}

TEST(CooperativeSort, SingleChannelForcesCollision) {
  const auto plan = cooperative_sort({0, 1}, {3}, table({{{3, 0.5}}, {{3, 0.7}}}));
  EXPECT_EQ(plan.orderings[0], std::vector<ChannelId>{3});
  EXPECT_EQ(plan.orderings[1], std::vector<ChannelId>{3});
  const auto collisions = collision_profile(plan);
  ASSERT_EQ(collisions.size(), 1u);
  EXPECT_EQ(collisions[0].rank, 0u);
  EXPECT_EQ(collisions[0].channel, 3u);
  EXPECT_EQ(collisions[0].members, (std::vector<SuId>{0, 1}));
}

TEST(CooperativeSort, BothRankWeakestSharedChannelLast) {
  // Two members with different favourites and a common weakest channel 6:
  // once the first two ranks are split, channel 6 is all that is left.
  const auto plan = cooperative_sort(
      {5, 8}, {2, 4, 6},
      table({{{2, 0.9}, {4, 0.5}, {6, 0.1}}, {{2, 0.6}, {4, 0.8}, {6, 0.2}}}));
  EXPECT_EQ(plan.orderings[0], (std::vector<ChannelId>{2, 4, 6}));
  EXPECT_EQ(plan.orderings[1], (std::vector<ChannelId>{4, 2, 6}));
  const auto collisions = collision_profile(plan);
  ASSERT_EQ(collisions.size(), 1u);
  EXPECT_EQ(collisions[0].rank, 2u);
  EXPECT_EQ(collisions[0].channel, 6u);
  EXPECT_EQ(collisions[0].members, (std::vector<SuId>{5, 8}));
}

TEST(CooperativeSort, TieGoesToLowerIndex) {
  const auto plan = cooperative_sort({0, 1}, {0, 1}, table({{{0, 0.5}, {1, 0.1}}, {{0, 0.5}, {1, 0.2}}}));
  EXPECT_EQ(plan.orderings[0].front(), 0u);
  EXPECT_EQ(plan.orderings[1].front(), 1u);
}

TEST(CooperativeSort, TraceRecordsForcedPick) {
  SortTrace trace;
  cooperative_sort({0, 1}, {3}, table({{{3, 0.5}}, {{3, 0.7}}}), &trace);
  const auto forced = std::count_if(trace.picks.begin(), trace.picks.end(),
                                    [](const RankPick& p) { return p.kind == PickKind::forced; });
  EXPECT_EQ(forced, 1);
}

TEST(BuildPlan, SingletonMatchesNoncoopOrder) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sc = generate_scenario(4, 14, 3, PhysParams{}, seed);
    for (SuId i = 0; i < 4; ++i) {
      const std::vector<SuId> one{i};
      const auto plan = build_plan(sc, one);
      EXPECT_EQ(plan.shared_channels, sc.su(i).known_channels);
      EXPECT_EQ(plan.orderings[0], noncoop_order(sc, i).channels);
    }
  }
}

TEST(BuildPlan, PoolsKnownChannels) {
  const auto sc = generate_scenario(3, 14, 3, PhysParams{}, 4);
  const std::vector<SuId> all{0, 1, 2};
  const auto plan = build_plan(sc, all);
  std::vector<ChannelId> pooled;
  for (SuId i : all)
    pooled.insert(pooled.end(), sc.su(i).known_channels.begin(), sc.su(i).known_channels.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
  EXPECT_EQ(plan.shared_channels, pooled);
}

// Property: every plan passes the replay audit (permutations, forced
// collisions only, weight priority in conflicts).
TEST(BuildPlan, AuditedOnRandomCoalitions) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    Rng rng(seed, Stream::experiment);
    const std::size_t n = 2 + rng.below(5);
    const std::size_t k = 1 + rng.below(9);
    const auto sc = generate_scenario(n, k, 1 + rng.below(std::min<std::size_t>(k, 3)),
                                      PhysParams{}, seed);
    std::vector<SuId> members(n);
    for (SuId i = 0; i < n; ++i) members[i] = i;
    SortTrace trace;
    const auto plan = build_plan(sc, members, &trace);
    const WeightFn weight = [&](std::size_t m, ChannelId c) {
      return sc.theta(c) * sc.gains().gain(plan.members[m], c);
    };
    const auto audit = oracle::audit_sort(plan, trace, weight);
    ASSERT_TRUE(audit.ok()) << "seed " << seed << ": " << audit.failure;
  }
}

TEST(BuildPlan, IndexOf) {
  const auto plan = cooperative_sort({3, 7}, {0}, table({{{0, 1.0}}, {{0, 1.0}}}));
  EXPECT_EQ(plan.index_of(7), 1u);
  EXPECT_THROW(plan.index_of(4), std::exception);
}

}  // namespace
}  // namespace crn
