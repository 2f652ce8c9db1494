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

#ifndef CRN_ORACLES_ORACLES_HPP
#define CRN_ORACLES_ORACLES_HPP

// Brute-force reference computations used to check the simulator. Everything
// here is written from the model definitions directly and shares no code with
// the library except where noted.

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "crn/coopsort.hpp"
#include "crn/partition.hpp"
#include "crn/scenario.hpp"

namespace crn::oracle {

inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

/// Expected sensing fraction by walking all 2^K availability patterns of the
/// channels in sensing order.
double sensing_time(const std::vector<double>& ordered_thetas, double alpha);

/// Joint first-free choice of every member over all availability patterns of
/// the pooled channels. Keys hold a channel id per member, kNone when idle.
std::map<std::vector<std::size_t>, double> outcome_distribution(
    const std::vector<std::vector<std::size_t>>& orderings,
    const std::vector<double>& thetas_by_channel);

/// Descending weight, ascending id on ties, by a plain comparison sort.
std::vector<std::size_t> reference_order(
    std::vector<std::size_t> channels,
    const std::function<double(std::size_t)>& weight);

/// Replays a recorded cooperative sort round by round.
struct SortAudit {
  bool permutations = true;       ///< every order is a permutation of K_S
  bool trace_consistent = true;   ///< trace replays to the same orders
  bool collisions_forced = true;  ///< every same-rank repeat has a witness
  bool weight_priority = true;    ///< conflict winners hold the top weight
  std::size_t collisions = 0;
  std::size_t conflicts = 0;
  std::string failure;  ///< first problem found

  bool ok() const {
    return permutations && trace_consistent && collisions_forced && weight_priority;
  }
};

SortAudit audit_sort(const CoalitionPlan& plan, const SortTrace& trace,
                     const WeightFn& weight);

/// Two members, two channels. gains[m][c], fixed[m][c].
struct TwoByTwo {
  std::array<std::array<double, 2>, 2> gains{};
  std::array<std::array<double, 2>, 2> fixed{};
  double noise = 1.0;
  double p_max = 1.0;
};

/// Sum-rate with powers[m][c], straight from the SINR expression.
double sum_rate(const TwoByTwo& problem,
                const std::array<std::array<double, 2>, 2>& powers);

/// Best sum-rate over the grid where each member puts i*p_max/steps on the
/// first channel and the rest on the second.
double grid_optimum(const TwoByTwo& problem, std::size_t steps = 100);

/// Per-SU payoffs of `partition` computed by a single straight-line pass:
/// own cooperative sort, availability-pattern enumeration for outcomes,
/// sensing times and outsider interference, then rank groups solved in
/// order. Power allocation calls the library's solver, which is the one
/// shared component.
std::vector<double> straight_line_payoffs(const Scenario& scenario,
                                          const Partition& partition);

}  // namespace crn::oracle

#endif  // CRN_ORACLES_ORACLES_HPP
