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

#include "crn/noncoop.hpp"
#include "crn/valuation.hpp"
#include "crn_oracles/oracles.hpp"
#include "worlds.hpp"

namespace crn {
namespace {

using testing::gain_for_snr;
using testing::make_world;

TEST(Valuation, SingleSu) {
  const auto sc = generate_scenario(1, 14, 3, PhysParams{}, 3);
  const auto payoffs = evaluate_partition(sc, Partition::singletons(1));
  const std::vector<double> none(14, 0.0);
  EXPECT_NEAR(payoffs[0], noncoop_utility(sc, 0, none), 1e-12);
}

TEST(Valuation, SingletonsMatchBaseline) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sc = generate_scenario(7, 14, 3, PhysParams{}, seed);
    const auto coop = evaluate_partition(sc, Partition::singletons(7));
    const auto base = noncoop_utilities(sc);
    for (SuId i = 0; i < 7; ++i) ASSERT_NEAR(coop[i], base[i], 1e-12) << "seed " << seed;
  }
}

TEST(Valuation, DisjointNeighboursBothGain) {
  // Each SU is strong on its own channel and nearly deaf on the other's.
  const auto sc = make_world({0.6, 0.7}, {{{1.0, 0.0}, {0}, {gain_for_snr(10.0), 1e-20}},
                                          {{1.0, 0.0}, {1}, {1e-20, gain_for_snr(10.0)}}});
  const auto alone = evaluate_partition(sc, Partition::singletons(2));
  const auto together = evaluate_partition(sc, Partition::grand(2));
  EXPECT_GE(together[0], alone[0] - 1e-12);
  EXPECT_GE(together[1], alone[1] - 1e-12);
}

TEST(Valuation, ContestedChannelCostsTheLoser) {
  // Both favour channel 0; the sort hands it to SU0 and pushes SU1 onto a
  // channel it can barely use.
  const auto sc = make_world({0.5, 0.9},
                             {{{1.0, 0.0}, {0, 1}, {gain_for_snr(100.0), gain_for_snr(0.01)}},
                              {{1.0, 0.0}, {0, 1}, {gain_for_snr(99.0), gain_for_snr(0.01)}}});
  const auto alone = evaluate_partition(sc, Partition::singletons(2));
  const auto together = evaluate_partition(sc, Partition::grand(2));
  EXPECT_GT(together[0], alone[0]);
  EXPECT_LT(together[1], alone[1]);
}

TEST(ExternalInterference, GrandCoalitionHasNoOutsiders) {
  const auto sc = generate_scenario(5, 14, 3, PhysParams{}, 8);
  const auto ctx = make_context(sc, Partition::grand(5));
  for (double x : ctx.ext_interference[0]) EXPECT_EQ(x, 0.0);
}

TEST(ExternalInterference, SingletonsMatchBaseline) {
  const auto sc = generate_scenario(6, 14, 3, PhysParams{}, 12);
  const auto ctx = make_context(sc, Partition::singletons(6));
  const auto base = noncoop_external_interference(sc);
  for (std::size_t c = 0; c < 6; ++c) {
    const SuId su = ctx.partition[c][0];
    for (ChannelId k = 0; k < 14; ++k)
      EXPECT_NEAR(ctx.ext_interference[c][k], base[su][k], 1e-24);
  }
}

TEST(ExternalInterference, TwoCoalitionsOneSharedChannel) {
  // {0} alone on channel 0; {1, 2} pools channels 0 and 1. SU2 knows only 0.
  const auto sc = make_world({0.6, 0.7}, {{{1.0, 0.0}, {0}, {1e-9, 1e-9}},
                                          {{1.0, 0.0}, {1}, {2e-9, 2e-9}},
                                          {{1.0, 0.0}, {0}, {3e-9, 5e-9}}});
  const Partition p({{0}, {1, 2}}, 3);
  const auto ctx = make_context(sc, p);
  const auto dist = enumerate_outcomes(ctx.plans[1], sc.thetas());
  const auto marg = transmit_marginals(dist, 2);
  // Outsiders of {0} on channel 0: SU1 and SU2 with their access probabilities.
  const double expected = 2e-9 * 10.0 * marg[0][0] + 3e-9 * 10.0 * marg[1][0];
  EXPECT_NEAR(ctx.ext_interference[0][0], expected, 1e-22);
  // Outsider of {1, 2} on channel 0 is SU0, which always tries channel 0.
  EXPECT_NEAR(ctx.ext_interference[1][0], 1e-9 * 10.0 * 0.6, 1e-22);
  EXPECT_EQ(ctx.ext_interference[1][1], 0.0);
}

TEST(Valuation, MatchesStraightLineEvaluator) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sc = generate_scenario(4, 8, 3, PhysParams{}, seed);
    for (const auto& p : {Partition::grand(4), Partition({{0, 2}, {1, 3}}, 4),
                          Partition({{0}, {1, 2, 3}}, 4)}) {
      const auto lib = evaluate_partition(sc, p);
      const auto ref = oracle::straight_line_payoffs(sc, p);
      for (std::size_t i = 0; i < 4; ++i) ASSERT_NEAR(lib[i], ref[i], 1e-9 * std::max(1.0, ref[i]));
    }
  }
}

TEST(Valuation, PayoffsAreNonNegative) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sc = generate_scenario(6, 14, 3, PhysParams{}, seed);
    for (const auto& p : {Partition::grand(6), Partition({{0, 1, 2}, {3, 4, 5}}, 6)})
      for (double x : evaluate_partition(sc, p)) EXPECT_GE(x, 0.0);
  }
}

TEST(Evaluator, AgreesWithDirectEvaluationAndCaches) {
  const auto sc = generate_scenario(6, 14, 3, PhysParams{}, 21);
  Evaluator ev(sc);
  const Partition p({{0, 3}, {1}, {2, 4, 5}}, 6);
  const auto direct = evaluate_partition(sc, p);
  const auto first = ev.payoffs(p);
  const auto evaluations = ev.value_evaluations();
  const auto second = ev.payoffs(p);
  EXPECT_EQ(first, second);
  EXPECT_EQ(ev.value_evaluations(), evaluations);
  EXPECT_GT(ev.value_cache_hits(), 0u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(first[i], direct[i], 1e-12);
  EXPECT_NEAR(ev.payoff(p, 4), direct[4], 1e-12);
}

TEST(Welfare, Sums) {
  const std::vector<double> x{1.0, 2.5, 0.5};
  EXPECT_DOUBLE_EQ(welfare(x), 4.0);
}

}  // namespace
}  // namespace crn
