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

#include "crn/formation.hpp"
#include "worlds.hpp"

namespace crn {
namespace {

using testing::gain_for_snr;
using testing::make_world;

// Strong on their own channel, nearly deaf on the other's: joining only adds
// a fallback channel, so both want it.
Scenario disjoint_pair() {
  return make_world({0.6, 0.7}, {{{1.0, 0.0}, {0}, {gain_for_snr(10.0), 1e-20}},
                                 {{1.0, 0.0}, {1}, {1e-20, gain_for_snr(10.0)}}});
}

// Both favour channel 0; cooperating hands it to SU0 and leaves SU1 on a
// channel it can barely use, so SU1 loses by cooperating.
Scenario contested_pair() {
  return make_world({0.5, 0.9},
                    {{{1.0, 0.0}, {0, 1}, {gain_for_snr(100.0), gain_for_snr(0.01)}},
                     {{1.0, 0.0}, {0, 1}, {gain_for_snr(99.0), gain_for_snr(0.01)}}});
}

TEST(Preference, SoloIsOwnPayoff) {
  const auto sc = disjoint_pair();
  Evaluator ev(sc);
  HistorySet h(2);
  const auto grand = Partition::grand(2);
  const auto solo = grand.with_move(0, std::nullopt);
  h.record(0, grand[0]);
  EXPECT_DOUBLE_EQ(preference_value(ev, 0, solo, grand, h), ev.payoff(solo, 0));
}

TEST(Preference, HistoryVetoes) {
  const auto sc = disjoint_pair();
  Evaluator ev(sc);
  HistorySet h(2);
  const auto singles = Partition::singletons(2);
  const auto grand = Partition::grand(2);
  EXPECT_GT(preference_value(ev, 0, grand, singles, h), 0.0);
  h.record(0, grand[0]);
  EXPECT_TRUE(h.contains(0, grand[0]));
  EXPECT_EQ(preference_value(ev, 0, grand, singles, h), 0.0);
  h.clear();
  EXPECT_TRUE(h.empty());
}

TEST(Preference, IncumbentMustNotLose) {
  const auto sc = contested_pair();
  Evaluator ev(sc);
  HistorySet h(2);
  const auto singles = Partition::singletons(2);
  const auto grand = Partition::grand(2);
  // SU0 would gain by joining SU1, but SU1 would lose.
  ASSERT_GT(ev.payoff(grand, 0), ev.payoff(singles, 0));
  ASSERT_LT(ev.payoff(grand, 1), ev.payoff(singles, 1));
  EXPECT_EQ(preference_value(ev, 0, grand, singles, h), 0.0);
}

TEST(Switch, SingleSuCannotMove) {
  const auto sc = generate_scenario(1, 14, 3, PhysParams{}, 1);
  Evaluator ev(sc);
  HistorySet h(1);
  EXPECT_FALSE(try_switch(ev, Partition::singletons(1), h, 0).has_value());
}

TEST(Switch, MutualGainExecutes) {
  const auto sc = disjoint_pair();
  Evaluator ev(sc);
  HistorySet h(2);
  const auto result = try_switch(ev, Partition::singletons(2), h, 0);
  ASSERT_TRUE(result.has_value());
  EXPECT_EQ(result->partition, Partition::grand(2));
  EXPECT_EQ(result->record.su, 0u);
  EXPECT_EQ(result->record.to, Coalition{1});
  EXPECT_GT(result->record.gain, 0.0);
}

TEST(Switch, VisitedPartitionIsVetoed) {
  const auto sc = disjoint_pair();
  Evaluator ev(sc);
  HistorySet h(2);
  VisitedPartitions visited;
  visited.insert(Partition::grand(2));
  std::size_t vetoed = 0;
  EXPECT_FALSE(try_switch(ev, Partition::singletons(2), h, 0, 0, &visited, &vetoed));
  EXPECT_EQ(vetoed, 1u);
}

TEST(Form, SingleSu) {
  const auto sc = generate_scenario(1, 14, 3, PhysParams{}, 1);
  const auto trace = form(sc, Partition::singletons(1), 1);
  EXPECT_TRUE(trace.converged);
  EXPECT_EQ(trace.passes, 1u);
  EXPECT_EQ(trace.final_partition, Partition::singletons(1));
}

TEST(Form, DisjointPairMerges) {
  const auto trace = form(disjoint_pair(), Partition::singletons(2), 3);
  EXPECT_TRUE(trace.converged);
  EXPECT_EQ(trace.final_partition, Partition::grand(2));
  EXPECT_EQ(trace.switches.size(), 1u);
}

TEST(Form, ReplayReproducesFinalPartition) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sc = generate_scenario(8, 14, 3, PhysParams{}, seed);
    const auto trace = form(sc, Partition::singletons(8), seed);
    EXPECT_EQ(replay(trace), trace.final_partition);
  }
}

TEST(Form, SameSeedSameTrace) {
  const auto sc = generate_scenario(9, 14, 3, PhysParams{}, 77);
  const auto a = form(sc, Partition::singletons(9), 5);
  const auto b = form(sc, Partition::singletons(9), 5);
  EXPECT_EQ(a.final_partition, b.final_partition);
  ASSERT_EQ(a.switches.size(), b.switches.size());
  for (std::size_t i = 0; i < a.switches.size(); ++i) EXPECT_EQ(a.switches[i].su, b.switches[i].su);
}

// Property: whatever formation returns passes the exhaustive audit.
TEST(Form, OutputIsNashStable) {
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    const std::size_t n = 4 + seed % 8;
    const auto sc = generate_scenario(n, 14, 3, PhysParams{}, seed);
    Evaluator ev(sc);
    const auto trace = form(ev, Partition::singletons(n), seed);
    ASSERT_TRUE(trace.converged);
    const auto verdict = audit_nash_stability(ev, trace.final_partition);
    ASSERT_TRUE(verdict.stable) << "seed " << seed;
  }
}

TEST(Form, TrappedWalkRestarts) {
  // This world has a closed improvement cycle reachable from singletons; the
  // first attempt gets caught in it.
  const auto sc = generate_scenario(8, 14, 3, PhysParams{}, 1004);
  Evaluator ev(sc);
  const auto trace = form(ev, Partition::singletons(8), 1004);
  EXPECT_TRUE(trace.converged);
  EXPECT_GT(trace.restarts, 0u);
  EXPECT_GT(trace.abandoned_switches, 0u);
  EXPECT_TRUE(audit_nash_stability(ev, trace.final_partition).stable);
  EXPECT_EQ(replay(trace), trace.final_partition);
}

TEST(Form, NoStablePartitionHitsGuard) {
  // Exhaustive search finds no Nash-stable partition for this world.
  const auto sc = generate_scenario(5, 14, 3, PhysParams{}, 5085);
  try {
    form(sc, Partition::singletons(5), 5085);
    FAIL() << "expected non-convergence";
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_convergence);
    EXPECT_EQ(e.trace().passes, 250u);
    EXPECT_FALSE(e.trace().converged);
  }
  bool any_stable = false;
  Evaluator ev(sc);
  for_each_partition(5, [&](const Partition& p) {
    any_stable = any_stable || audit_nash_stability(ev, p).stable;
  });
  EXPECT_FALSE(any_stable);
}

TEST(Form, RejectsSizeMismatch) {
  const auto sc = generate_scenario(3, 14, 3, PhysParams{}, 1);
  EXPECT_THROW(form(sc, Partition::singletons(4), 1), Error);
}

TEST(Audit, ReportsExactDeviation) {
  const auto v = audit_nash_stability(disjoint_pair(), Partition::singletons(2));
  EXPECT_FALSE(v.stable);
  ASSERT_EQ(v.violations.size(), 2u);
  EXPECT_EQ(v.violations[0].su, 0u);
  EXPECT_EQ(v.violations[0].destination, Coalition{1});
  EXPECT_EQ(v.violations[1].su, 1u);
  EXPECT_EQ(v.violations[1].destination, Coalition{0});
  EXPECT_GT(v.violations[0].gain, 0.0);
}

TEST(Audit, NoGainingPairIsStable) {
  EXPECT_TRUE(audit_nash_stability(contested_pair(), Partition::singletons(2)).stable);
}

TEST(Optimal, SingleSu) {
  const auto sc = generate_scenario(1, 14, 3, PhysParams{}, 2);
  EXPECT_EQ(optimal_partition(sc).partition, Partition::singletons(1));
}

TEST(Optimal, PairPicksBetterOfTwo) {
  for (const auto& sc : {disjoint_pair(), contested_pair()}) {
    const auto best = optimal_partition(sc);
    const double apart = welfare(evaluate_partition(sc, Partition::singletons(2)));
    const double together = welfare(evaluate_partition(sc, Partition::grand(2)));
    EXPECT_NEAR(best.welfare, std::max(apart, together), 1e-12);
    EXPECT_EQ(best.partitions_evaluated, 2u);
  }
}

TEST(Optimal, DominatesFormation) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto sc = generate_scenario(4, 14, 3, PhysParams{}, seed);
    Evaluator ev(sc);
    const auto trace = form(ev, Partition::singletons(4), seed);
    EXPECT_GE(optimal_partition(ev).welfare + 1e-12, welfare(ev.payoffs(trace.final_partition)));
  }
}

TEST(Optimal, RefusesLargeNetworks) {
  const auto sc = generate_scenario(9, 14, 3, PhysParams{}, 2);
  try {
    optimal_partition(sc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::size_limit);
  }
}

TEST(Partition, BellNumbersAndEnumeration) {
  EXPECT_EQ(bell_number(0), 1u);
  EXPECT_EQ(bell_number(5), 52u);
  EXPECT_EQ(bell_number(8), 4140u);
  std::size_t count = 0;
  for_each_partition(6, [&](const Partition&) { ++count; });
  EXPECT_EQ(count, 203u);
}

TEST(Partition, MovesAndFingerprint) {
  const Partition p({{2, 0}, {1}}, 3);
  EXPECT_EQ(p.fingerprint(), "{0,2}{1}");
  const auto q = p.with_move(2, 1);
  EXPECT_EQ(q.fingerprint(), "{0}{1,2}");
  EXPECT_EQ(q.with_move(1, std::nullopt).fingerprint(), "{0}{1}{2}");
  const Partition pair({{0, 1}, {2, 3}}, 4);
  EXPECT_EQ(pair.with_move(0, std::nullopt).fingerprint(), "{0}{1}{2,3}");
  EXPECT_THROW(Partition({{0, 1}, {1}}, 2), Error);
  EXPECT_THROW(Partition({{0}}, 2), Error);
}

}  // namespace
}  // namespace crn
