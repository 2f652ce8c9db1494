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

#ifndef CRN_OUTCOMES_HPP
#define CRN_OUTCOMES_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "crn/coopsort.hpp"

namespace crn {

/// Assignment value for a member that finds every channel busy.
inline constexpr ChannelId kIdle = std::numeric_limits<ChannelId>::max();

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// One joint access outcome of a coalition.
struct OutcomeTuple {
  /// Selected channel (or kIdle) per member, aligned with plan.members.
  std::vector<ChannelId> assignment;
  double prob = 0.0;
  /// Members (indices into plan.members) grouped by the rank of their selected
  /// channel in their own order, ascending rank. Idle members are left out.
  std::vector<std::vector<std::size_t>> rank_groups;
};

struct OutcomeDistribution {
  std::vector<SuId> coalition;
  std::vector<OutcomeTuple> tuples;
};

/// Probability that the coalition ends up with `assignment`: the selected
/// channels must be free and every channel ranked before a member's pick must
/// be busy. An idle member needs all pooled channels busy.
double tuple_probability(const CoalitionPlan& plan,
                         std::span<const ChannelId> assignment,
                         std::span<const double> thetas);

std::vector<std::vector<std::size_t>> rank_groups(
    const CoalitionPlan& plan, std::span<const ChannelId> assignment);

/// All assignments with non-zero probability, idle outcomes included.
/// Infeasible partial assignments are pruned during the search; `cap` bounds
/// the number of stored tuples and exceeding it raises enumeration_limit.
OutcomeDistribution enumerate_outcomes(
    const CoalitionPlan& plan, std::span<const double> thetas,
    std::size_t cap = kDefaultEnumerationCap);

/// Probability that each member transmits on each channel, indexed
/// [member][channel id] over `n_channels` channels.
std::vector<std::vector<double>> transmit_marginals(
    const OutcomeDistribution& dist, std::size_t n_channels);

}  // namespace crn

#endif  // CRN_OUTCOMES_HPP
