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

#include "crn/coopsort.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "crn/error.hpp"
#include "crn/noncoop.hpp"

namespace crn {

std::size_t CoalitionPlan::index_of(SuId su) const {
  const auto it = std::lower_bound(members.begin(), members.end(), su);
  if (it == members.end() || *it != su)
    throw Error(ErrorKind::invalid_input,
                "SU " + std::to_string(su) + " is not in the coalition");
  return static_cast<std::size_t>(it - members.begin());
}

namespace {

// Highest weight first, ascending channel id on ties. `allowed` is non-empty.
ChannelId best_channel(std::size_t member, const std::vector<ChannelId>& allowed,
                       const WeightFn& weight) {
  ChannelId best = allowed.front();
  double best_w = weight(member, best);
  for (std::size_t i = 1; i < allowed.size(); ++i) {
    const double w = weight(member, allowed[i]);
    if (w > best_w || (w == best_w && allowed[i] < best)) {
      best = allowed[i];
      best_w = w;
    }
  }
  return best;
}

}  // namespace

CoalitionPlan cooperative_sort(std::vector<SuId> members,
                               std::vector<ChannelId> shared_channels,
                               const WeightFn& weight, SortTrace* trace) {
  if (members.empty())
    throw Error(ErrorKind::invalid_input, "coalition has no members");
  if (!std::is_sorted(members.begin(), members.end()))
    throw Error(ErrorKind::invalid_input, "members must be ascending");
  std::sort(shared_channels.begin(), shared_channels.end());
  shared_channels.erase(
      std::unique(shared_channels.begin(), shared_channels.end()),
      shared_channels.end());
  if (shared_channels.empty())
    throw Error(ErrorKind::invalid_input, "coalition knows no channel");

  const std::size_t m_count = members.size();
  const std::size_t k_count = shared_channels.size();

  CoalitionPlan plan;
  plan.members = std::move(members);
  plan.shared_channels = shared_channels;
  plan.orderings.assign(m_count, {});
  for (auto& o : plan.orderings) o.reserve(k_count);

  // used[m] holds channels member m has already ranked.
  std::vector<std::vector<bool>> used(m_count, std::vector<bool>(k_count, false));
  const auto slot = [&](ChannelId k) {
    return static_cast<std::size_t>(
        std::lower_bound(shared_channels.begin(), shared_channels.end(), k) -
        shared_channels.begin());
  };

  for (std::size_t rank = 0; rank < k_count; ++rank) {
    std::vector<bool> taken_at_rank(k_count, false);
    std::vector<std::size_t> pending(m_count);
    for (std::size_t m = 0; m < m_count; ++m) pending[m] = m;

    const auto fix = [&](std::size_t m, ChannelId k, std::size_t round,
                         PickKind kind, std::vector<std::size_t> contenders,
                         std::vector<ChannelId> open) {
      plan.orderings[m].push_back(k);
      used[m][slot(k)] = true;
      taken_at_rank[slot(k)] = true;
      if (trace)
        trace->picks.push_back({rank, round, m, k, kind, std::move(contenders),
                                std::move(open)});
    };

    // Every round fixes at least one pending member.
    const std::size_t round_limit = k_count * m_count;
    for (std::size_t round = 0; !pending.empty(); ++round) {
      if (round >= round_limit)
        throw Error(ErrorKind::non_convergence,
                    "cooperative sort exceeded its round bound");

      std::map<ChannelId, std::vector<std::size_t>> proposals;
      std::vector<std::vector<ChannelId>> open_sets(m_count);
      std::vector<std::pair<std::size_t, ChannelId>> forced;
      for (std::size_t m : pending) {
        std::vector<ChannelId> open;
        std::vector<ChannelId> remaining;
        for (std::size_t s = 0; s < k_count; ++s) {
          if (used[m][s]) continue;
          remaining.push_back(shared_channels[s]);
          if (!taken_at_rank[s]) open.push_back(shared_channels[s]);
        }
        if (open.empty()) {
          forced.emplace_back(m, best_channel(m, remaining, weight));
        } else {
          proposals[best_channel(m, open, weight)].push_back(m);
          open_sets[m] = std::move(open);
        }
      }

      std::vector<std::size_t> next;
      for (auto& [m, k] : forced) fix(m, k, round, PickKind::forced, {}, {});
      for (auto& [k, group] : proposals) {
        if (group.size() == 1) {
          fix(group.front(), k, round, PickKind::unique, group,
              std::move(open_sets[group.front()]));
          continue;
        }
        std::size_t winner = group.front();
        double best_w = weight(winner, k);
        for (std::size_t m : group) {
          const double w = weight(m, k);
          if (w > best_w) {  // group is ascending, so ties keep the lower id
            winner = m;
            best_w = w;
          }
        }
        for (std::size_t m : group)
          if (m != winner) next.push_back(m);
        fix(winner, k, round, PickKind::conflict_winner, group,
            std::move(open_sets[winner]));
      }
      std::sort(next.begin(), next.end());
      pending = std::move(next);
    }
  }
  return plan;
}

CoalitionPlan build_plan(const Scenario& scenario,
                         std::span<const SuId> members, SortTrace* trace) {
  std::vector<SuId> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::invalid_input, "duplicate coalition member");
  std::vector<ChannelId> shared;
  for (SuId su : sorted) {
    if (su >= scenario.n_sus())
      throw Error(ErrorKind::invalid_input, "SU id out of range");
    const auto& known = scenario.su(su).known_channels;
    shared.insert(shared.end(), known.begin(), known.end());
  }
  const auto weight = [&](std::size_t m, ChannelId k) {
    return channel_weight(scenario.theta(k), scenario.gains().gain(sorted[m], k));
  };
  return cooperative_sort(sorted, std::move(shared), weight, trace);
}

std::vector<RankCollision> collision_profile(const CoalitionPlan& plan) {
  std::vector<RankCollision> out;
  const std::size_t ranks = plan.shared_channels.size();
  for (std::size_t r = 0; r < ranks; ++r) {
    std::map<ChannelId, std::vector<SuId>> by_channel;
    for (std::size_t m = 0; m < plan.size(); ++m)
      by_channel[plan.orderings[m][r]].push_back(plan.members[m]);
    for (auto& [k, who] : by_channel)
      if (who.size() > 1) out.push_back({r, k, std::move(who)});
  }
  return out;
}

}  // namespace crn
