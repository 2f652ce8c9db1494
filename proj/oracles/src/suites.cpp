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

#include "crn_oracles/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "crn/coopsort.hpp"
#include "crn/noncoop.hpp"
#include "crn/outcomes.hpp"
#include "crn/power.hpp"
#include "crn/rng.hpp"
#include "crn/valuation.hpp"
#include "crn_oracles/oracles.hpp"

namespace crn::oracle {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Random non-empty subset of {0..n-1} with at most `limit` members.
Coalition random_coalition(Rng& rng, std::size_t n, std::size_t limit) {
  std::vector<SuId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
  const std::size_t size = 1 + rng.below(std::min(n, limit));
  Coalition c(ids.begin(), ids.begin() + static_cast<long>(size));
  std::sort(c.begin(), c.end());
  return c;
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

}  // namespace

SuiteResult probability_suite(std::size_t count, std::uint64_t seed) {
  Stopwatch clock;
  SuiteResult r{"tuple_probability", 0, 0, 0.0, 1e-12, {}, 0.0};
  double worst_norm = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, Stream::experiment, i);
    const std::size_t k = 1 + rng.below(6);
    const std::size_t k_i = 1 + rng.below(std::min<std::size_t>(k, 3));
    const auto sc = generate_scenario(3, k, k_i, PhysParams{}, seed * 1000 + i);
    const auto coalition = random_coalition(rng, 3, 3);
    const auto plan = build_plan(sc, coalition);
    const auto dist = enumerate_outcomes(plan, sc.thetas());

    std::vector<std::vector<std::size_t>> orders(plan.orderings.begin(),
                                                 plan.orderings.end());
    const std::vector<double> thetas(sc.thetas().begin(), sc.thetas().end());
    auto reference = outcome_distribution(orders, thetas);

    double err = 0.0;
    double total = 0.0;
    for (const auto& t : dist.tuples) {
      std::vector<std::size_t> key;
      for (ChannelId c : t.assignment) key.push_back(c == kIdle ? kNone : c);
      const auto it = reference.find(key);
      const double expected = it == reference.end() ? 0.0 : it->second;
      err = std::max(err, std::abs(expected - t.prob));
      // Cross-check the closed form on the same assignment too.
      err = std::max(err, std::abs(tuple_probability(plan, t.assignment, sc.thetas()) -
                                   expected));
      if (it != reference.end()) reference.erase(it);
      total += t.prob;
    }
    for (const auto& [key, p] : reference) err = std::max(err, p);  // missing mass
    const double norm = std::abs(total - 1.0);
    worst_norm = std::max(worst_norm, norm);
    r.max_error = std::max(r.max_error, err);
    ++r.cases;
    if (err > 1e-12 || norm > 1e-9) ++r.failures;
  }
  r.note = "worst normalization error " + std::to_string(worst_norm);
  r.seconds = clock.seconds();
  return r;
}

SuiteResult sensing_suite(std::size_t count, std::uint64_t seed) {
  Stopwatch clock;
  SuiteResult r{"sensing_time", 0, 0, 0.0, 1e-12, {}, 0.0};
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, Stream::experiment, i);
    const std::size_t k = 1 + rng.below(10);
    std::vector<double> thetas(k);
    for (auto& t : thetas) t = rng.uniform();
    std::vector<ChannelId> order(k);
    for (std::size_t j = 0; j < k; ++j) order[j] = j;
    for (std::size_t j = k; j > 1; --j) std::swap(order[j - 1], order[rng.below(j)]);
    const double alpha = rng.uniform(0.01, 0.5);

    std::vector<double> ordered;
    for (ChannelId c : order) ordered.push_back(thetas[c]);
    const double err =
        std::abs(crn::sensing_time(order, thetas, alpha) - oracle::sensing_time(ordered, alpha));
    r.max_error = std::max(r.max_error, err);
    ++r.cases;
    if (err > r.tolerance) ++r.failures;
  }
  r.seconds = clock.seconds();
  return r;
}

SuiteResult sort_suite(std::size_t count, std::uint64_t seed) {
  Stopwatch clock;
  SuiteResult r{"cooperative_sort", 0, 0, 0.0, 0.0, {}, 0.0};
  std::size_t collisions = 0;
  std::size_t conflicts = 0;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, Stream::experiment, i);
    const std::size_t n = 2 + rng.below(5);
    // Small channel pools make forced collisions common.
    const std::size_t k = 1 + rng.below(10);
    const std::size_t k_i = 1 + rng.below(std::min<std::size_t>(k, 4));
    const auto sc = generate_scenario(n, k, k_i, PhysParams{}, seed * 1000 + i);
    const auto coalition = random_coalition(rng, n, n);
    SortTrace trace;
    const auto plan = build_plan(sc, coalition, &trace);
    const WeightFn weight = [&](std::size_t m, ChannelId c) {
      return sc.theta(c) * sc.gains().gain(plan.members[m], c);
    };
    const auto audit = audit_sort(plan, trace, weight);
    collisions += audit.collisions;
    conflicts += audit.conflicts;
    ++r.cases;
    if (!audit.ok()) {
      ++r.failures;
      if (r.note.empty()) r.note = audit.failure;
    }
  }
  if (r.note.empty())
    r.note = std::to_string(collisions) + " collisions, " + std::to_string(conflicts) +
             " conflicts audited";
  r.seconds = clock.seconds();
  return r;
}

SuiteResult power_suite(std::size_t count, std::uint64_t seed) {
  Stopwatch clock;
  SuiteResult r{"power_allocation", 0, 0, -1.0, 1e-3, {}, 0.0};
  double worst_feasibility = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, Stream::experiment, i);
    TwoByTwo problem;
    problem.noise = 1e-9;
    problem.p_max = 10.0;
    RateContext ctx(2, 2, problem.noise);
    for (std::size_t m = 0; m < 2; ++m)
      for (std::size_t c = 0; c < 2; ++c) {
        // Received SNR per mW from 0.1 to 1e4, background up to 10x noise.
        problem.gains[m][c] = log_uniform(rng, 1e-11, 1e-6);
        problem.fixed[m][c] = rng.uniform() < 0.5 ? 0.0 : log_uniform(rng, 1e-11, 1e-8);
        ctx.gains[m * 2 + c] = problem.gains[m][c];
        ctx.fixed_interference[m * 2 + c] = problem.fixed[m][c];
      }
    const auto alloc = allocate(ctx, problem.p_max);
    for (std::size_t m = 0; m < 2; ++m) {
      const double row = alloc.at(m, 0) + alloc.at(m, 1);
      worst_feasibility = std::max(worst_feasibility, std::abs(row - problem.p_max));
      if (alloc.at(m, 0) < 0.0 || alloc.at(m, 1) < 0.0) worst_feasibility = 1.0;
    }
    const double achieved = oracle::sum_rate(
        problem, {{{alloc.at(0, 0), alloc.at(0, 1)}, {alloc.at(1, 0), alloc.at(1, 1)}}});
    const double grid = grid_optimum(problem, 100);
    const double shortfall = (grid - achieved) / grid;
    r.max_error = std::max(r.max_error, shortfall);
    ++r.cases;
    if (shortfall > r.tolerance) ++r.failures;
  }
  if (worst_feasibility > 1e-9) r.failures = std::max<std::size_t>(r.failures, 1);
  r.note = "worst budget violation " + std::to_string(worst_feasibility);
  r.seconds = clock.seconds();
  return r;
}

SuiteResult partition_suite(std::size_t count, std::uint64_t seed) {
  Stopwatch clock;
  SuiteResult r{"partition_valuation", 0, 0, 0.0, 1e-9, {}, 0.0};
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, Stream::experiment, i);
    const auto sc = generate_scenario(4, 8, 3, PhysParams{}, seed * 1000 + i);
    // Random restricted growth string.
    std::vector<std::size_t> label(4, 0);
    std::size_t top = 0;
    for (std::size_t j = 1; j < 4; ++j) {
      label[j] = rng.below(top + 2);
      top = std::max(top, label[j]);
    }
    std::vector<Coalition> cs(top + 1);
    for (SuId j = 0; j < 4; ++j) cs[label[j]].push_back(j);
    const Partition p(cs, 4);
    const auto lib = evaluate_partition(sc, p);
    const auto ref = straight_line_payoffs(sc, p);
    double err = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
      err = std::max(err, std::abs(lib[j] - ref[j]) / std::max(1.0, std::abs(ref[j])));
    r.max_error = std::max(r.max_error, err);
    ++r.cases;
    if (err > r.tolerance) ++r.failures;
  }
  r.seconds = clock.seconds();
  return r;
}

SuiteResult singleton_suite(std::size_t count, std::uint64_t seed) {
  Stopwatch clock;
  SuiteResult r{"singleton_consistency", 0, 0, 0.0, 1e-12, {}, 0.0};
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, Stream::experiment, i);
    const std::size_t n = 1 + rng.below(12);
    const auto sc = generate_scenario(n, 14, 3, PhysParams{}, seed * 1000 + i);
    const auto lib = evaluate_partition(sc, Partition::singletons(n));
    const auto base = noncoop_utilities(sc);
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(lib[j] - base[j]));
    r.max_error = std::max(r.max_error, err);
    ++r.cases;
    if (err > r.tolerance) ++r.failures;
  }
  r.seconds = clock.seconds();
  return r;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
  return {probability_suite(200, seed), sensing_suite(500, seed), sort_suite(500, seed),
          power_suite(100, seed),       partition_suite(30, seed), singleton_suite(50, seed)};
}

}  // namespace crn::oracle
