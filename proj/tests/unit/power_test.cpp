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

#include <cmath>
#include <numeric>

#include "crn/power.hpp"
#include "crn/rng.hpp"
#include "crn_oracles/oracles.hpp"

namespace crn {
namespace {

TEST(Capacity, ZeroPowerContributesNothing) {
  RateContext ctx(1, 2, 1.0);
  ctx.gains = {3.0, 3.0};
  PowerAllocation a(1, 2);
  a.at(0, 0) = 1.0;
  EXPECT_EQ(group_capacity(a, ctx, 0, 1), 0.0);
  EXPECT_NEAR(member_capacity(a, ctx, 0), 2.0, 1e-15);
}

TEST(Capacity, SnrThreeIsTwoBits) {
  RateContext ctx(1, 1, 1e-9);
  ctx.gains = {3e-10};
  PowerAllocation a(1, 1);
  a.at(0, 0) = 10.0;
  EXPECT_NEAR(sum_rate(a, ctx), 2.0, 1e-12);
}

TEST(Capacity, SymmetricSharedChannelIsAboutOneBit) {
  RateContext ctx(2, 1, 1e-9);
  ctx.gains = {1e-6, 1e-6};
  PowerAllocation a(2, 1);
  a.at(0, 0) = 10.0;
  a.at(1, 0) = 10.0;
  EXPECT_NEAR(group_capacity(a, ctx, 0, 0), 1.0, 1e-3);
  EXPECT_NEAR(group_capacity(a, ctx, 1, 0), 1.0, 1e-3);
}

TEST(Capacity, FixedInterferenceCounts) {
  RateContext ctx(1, 1, 1.0);
  ctx.gains = {3.0};
  ctx.fixed_interference = {1.0};
  PowerAllocation a(1, 1);
  a.at(0, 0) = 2.0;
  EXPECT_NEAR(sum_rate(a, ctx), std::log2(4.0), 1e-15);
}

TEST(Waterfill, Symmetric) {
  const std::vector<double> r{4.0, 4.0};
  const auto p = waterfill(r, 10.0);
  EXPECT_NEAR(p[0], 5.0, 1e-12);
  EXPECT_NEAR(p[1], 5.0, 1e-12);
}

TEST(Waterfill, LowBudgetGoesToBestChannel) {
  const std::vector<double> r{1e6, 1e-6};
  const auto p = waterfill(r, 0.1);
  EXPECT_NEAR(p[0], 0.1, 1e-12);
  EXPECT_EQ(p[1], 0.0);
}

TEST(Waterfill, TwoToOne) {
  const std::vector<double> r{2.0, 1.0};
  const auto p = waterfill(r, 1.0);
  EXPECT_NEAR(p[0], 0.75, 1e-12);
  EXPECT_NEAR(p[1], 0.25, 1e-12);
}

TEST(Waterfill, AllZeroRatiosSplitEvenly) {
  const std::vector<double> r{0.0, 0.0, 0.0, 0.0};
  for (double x : waterfill(r, 2.0)) EXPECT_NEAR(x, 0.5, 1e-15);
}

// Property: KKT. Channels with power share the marginal r/(1 + r p); channels
// without power sit below it.
TEST(Waterfill, KktConditions) {
  Rng rng(17, Stream::experiment);
  for (int t = 0; t < 300; ++t) {
    const std::size_t k = 1 + rng.below(8);
    std::vector<double> r(k);
    for (auto& x : r) x = std::exp(rng.uniform(-6.0, 6.0));
    const double budget = std::exp(rng.uniform(-3.0, 3.0));
    const auto p = waterfill(r, budget);
    ASSERT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), budget, 1e-9 * budget);
    double level = -1.0;
    for (std::size_t i = 0; i < k; ++i)
      if (p[i] > 0.0) level = std::max(level, r[i] / (1.0 + r[i] * p[i]));
    for (std::size_t i = 0; i < k; ++i) {
      ASSERT_GE(p[i], 0.0);
      const double marginal = r[i] / (1.0 + r[i] * p[i]);
      if (p[i] > 0.0)
        ASSERT_NEAR(marginal, level, 1e-9 * level);
      else
        ASSERT_LE(marginal, level * (1.0 + 1e-9));
    }
  }
}

TEST(Allocate, SingleChannelTakesAll) {
  RateContext ctx(1, 1, 1e-9);
  ctx.gains = {1e-8};
  const auto a = allocate(ctx, 10.0);
  EXPECT_DOUBLE_EQ(a.at(0, 0), 10.0);
}

TEST(Allocate, EqualChannelsSplitEvenly) {
  RateContext ctx(1, 2, 1e-9);
  ctx.gains = {1e-8, 1e-8};
  const auto a = allocate(ctx, 10.0);
  EXPECT_NEAR(a.at(0, 0), 5.0, 1e-9);
  EXPECT_NEAR(a.at(0, 1), 5.0, 1e-9);
}

TEST(Allocate, BeatsGridOnTwoByTwo) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed, Stream::experiment);
    oracle::TwoByTwo problem;
    problem.noise = 1e-9;
    problem.p_max = 10.0;
    RateContext ctx(2, 2, problem.noise);
    for (std::size_t m = 0; m < 2; ++m)
      for (std::size_t c = 0; c < 2; ++c) {
        problem.gains[m][c] = std::exp(rng.uniform(std::log(1e-11), std::log(1e-6)));
        ctx.gains[m * 2 + c] = problem.gains[m][c];
      }
    const auto report = allocate_report(ctx, problem.p_max);
    const auto& a = report.allocation;
    for (std::size_t m = 0; m < 2; ++m) ASSERT_NEAR(a.at(m, 0) + a.at(m, 1), 10.0, 1e-9);
    const double grid = oracle::grid_optimum(problem);
    ASSERT_GE(report.sum_rate, grid * (1.0 - 1e-3)) << "seed " << seed;
    ASSERT_NEAR(report.sum_rate, sum_rate(a, ctx), 1e-12);
  }
}

TEST(Allocate, ReportHistoryIsMonotone) {
  RateContext ctx(3, 3, 1e-9);
  Rng rng(5, Stream::experiment);
  for (auto& g : ctx.gains) g = std::exp(rng.uniform(std::log(1e-10), std::log(1e-7)));
  const auto report = allocate_report(ctx, 10.0);
  ASSERT_FALSE(report.best_history.empty());
  for (std::size_t i = 1; i < report.best_history.size(); ++i)
    EXPECT_GE(report.best_history[i], report.best_history[i - 1]);
  EXPECT_NEAR(report.best_history.back(), report.sum_rate, 1e-12);
}

}  // namespace
}  // namespace crn
