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

#ifndef CRN_COOPSORT_HPP
#define CRN_COOPSORT_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "crn/scenario.hpp"

namespace crn {

/// Cooperative state of one coalition: the pooled channel set and the sensing
/// order each member follows over it.
struct CoalitionPlan {
  std::vector<SuId> members;               ///< ascending SU ids
  std::vector<ChannelId> shared_channels;  ///< union of known sets, ascending
  /// orderings[m] is the cooperative order of members[m]; each one is a
  /// permutation of shared_channels.
  std::vector<std::vector<ChannelId>> orderings;

  std::size_t size() const noexcept { return members.size(); }
  /// Position of `su` within `members`; throws if absent.
  std::size_t index_of(SuId su) const;
};

enum class PickKind {
  unique,           ///< nobody else proposed the channel this round
  conflict_winner,  ///< highest weight among the members proposing it
  forced,           ///< no channel left that is free at this rank
};

/// One rank assignment made while sorting, for auditing the procedure.
struct RankPick {
  std::size_t rank = 0;   ///< 0-based
  std::size_t round = 0;  ///< proposal round within the rank
  std::size_t member = 0; ///< index into CoalitionPlan::members
  ChannelId channel = 0;
  PickKind kind = PickKind::unique;
  /// Members (indices) that proposed `channel` in this round.
  std::vector<std::size_t> contenders;
  /// Channels the member could choose from without colliding, at the time of
  /// the pick. Empty exactly when the pick is forced.
  std::vector<ChannelId> open_candidates;
};

struct SortTrace {
  std::vector<RankPick> picks;
};

/// weight(member_index, channel)
using WeightFn = std::function<double(std::size_t, ChannelId)>;

/// Rank-by-rank cooperative ordering.
///
/// At each rank every member proposes its best channel not yet in its own
/// order and not already fixed by a partner at this rank. Unique proposals
/// are fixed; a contested channel goes to the highest weight (lowest index on
/// ties) and the losers propose again. A member left with no free channel at
/// this rank takes its best remaining one and collides.
CoalitionPlan cooperative_sort(std::vector<SuId> members,
                               std::vector<ChannelId> shared_channels,
                               const WeightFn& weight,
                               SortTrace* trace = nullptr);

/// Plan for `members` using weights theta_k * g_ik over the pooled channels.
CoalitionPlan build_plan(const Scenario& scenario,
                         std::span<const SuId> members,
                         SortTrace* trace = nullptr);

struct RankCollision {
  std::size_t rank = 0;
  ChannelId channel = 0;
  std::vector<SuId> members;
};

/// Channels chosen by more than one member at the same rank.
std::vector<RankCollision> collision_profile(const CoalitionPlan& plan);

}  // namespace crn

#endif  // CRN_COOPSORT_HPP
