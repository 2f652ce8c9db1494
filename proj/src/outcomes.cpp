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

#include "crn/outcomes.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

#include "crn/error.hpp"

namespace crn {

namespace {

using Mask = std::uint64_t;

constexpr Mask bit(std::size_t s) { return Mask{1} << s; }

// Per-member view of the plan in terms of slots of shared_channels.
struct SlotPlan {
  std::vector<std::vector<std::size_t>> slot_at;   // [m][rank] -> slot
  std::vector<std::vector<Mask>> prefix;           // [m][rank] -> ranks before
  std::vector<std::vector<std::size_t>> rank_of;   // [m][slot] -> rank
  Mask all = 0;
};

SlotPlan make_slot_plan(const CoalitionPlan& plan) {
  const auto& shared = plan.shared_channels;
  const std::size_t k_count = shared.size();
  if (k_count > 64)
    throw Error(ErrorKind::size_limit, "coalition pools more than 64 channels");
  SlotPlan sp;
  sp.all = k_count == 64 ? ~Mask{0} : bit(k_count) - 1;
  sp.slot_at.resize(plan.size());
  sp.prefix.resize(plan.size());
  sp.rank_of.assign(plan.size(), std::vector<std::size_t>(k_count, 0));
  for (std::size_t m = 0; m < plan.size(); ++m) {
    Mask acc = 0;
    for (std::size_t r = 0; r < plan.orderings[m].size(); ++r) {
      const ChannelId k = plan.orderings[m][r];
      const auto it = std::lower_bound(shared.begin(), shared.end(), k);
      const auto s = static_cast<std::size_t>(it - shared.begin());
      sp.slot_at[m].push_back(s);
      sp.prefix[m].push_back(acc);
      sp.rank_of[m][s] = r;
      acc |= bit(s);
    }
  }
  return sp;
}

double mask_probability(Mask selected, Mask busy,
                        const std::vector<ChannelId>& shared,
                        std::span<const double> thetas) {
  double p = 1.0;
  for (Mask b = selected; b; b &= b - 1)
    p *= thetas[shared[static_cast<std::size_t>(std::countr_zero(b))]];
  for (Mask b = busy; b; b &= b - 1)
    p *= 1.0 - thetas[shared[static_cast<std::size_t>(std::countr_zero(b))]];
  return p;
}

std::size_t rank_in(const CoalitionPlan& plan, std::size_t m, ChannelId k) {
  const auto& order = plan.orderings[m];
  const auto it = std::find(order.begin(), order.end(), k);
  if (it == order.end())
    throw Error(ErrorKind::invalid_input,
                "channel " + std::to_string(k) + " is not in member " +
                    std::to_string(plan.members[m]) + "'s order");
  return static_cast<std::size_t>(it - order.begin());
}

}  // namespace

double tuple_probability(const CoalitionPlan& plan,
                         std::span<const ChannelId> assignment,
                         std::span<const double> thetas) {
  if (assignment.size() != plan.size())
    throw Error(ErrorKind::invalid_input, "assignment size mismatch");
  const auto sp = make_slot_plan(plan);
  Mask selected = 0;
  Mask busy = 0;
  for (std::size_t m = 0; m < plan.size(); ++m) {
    if (assignment[m] == kIdle) {
      busy |= sp.all;
      continue;
    }
    const std::size_t r = rank_in(plan, m, assignment[m]);
    selected |= bit(sp.slot_at[m][r]);
    busy |= sp.prefix[m][r];
  }
  if (selected & busy) return 0.0;
  return mask_probability(selected, busy, plan.shared_channels, thetas);
}

std::vector<std::vector<std::size_t>> rank_groups(
    const CoalitionPlan& plan, std::span<const ChannelId> assignment) {
  if (assignment.size() != plan.size())
    throw Error(ErrorKind::invalid_input, "assignment size mismatch");
  std::vector<std::pair<std::size_t, std::size_t>> ranked;  // (rank, member)
  for (std::size_t m = 0; m < plan.size(); ++m)
    if (assignment[m] != kIdle)
      ranked.emplace_back(rank_in(plan, m, assignment[m]), m);
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i == 0 || ranked[i].first != ranked[i - 1].first) groups.emplace_back();
    groups.back().push_back(ranked[i].second);
  }
  return groups;
}

OutcomeDistribution enumerate_outcomes(const CoalitionPlan& plan,
                                       std::span<const double> thetas,
                                       std::size_t cap) {
  const auto sp = make_slot_plan(plan);
  const std::size_t m_count = plan.size();
  const std::size_t k_count = plan.shared_channels.size();

  OutcomeDistribution dist;
  dist.coalition = plan.members;

  std::vector<std::size_t> choice(m_count, 0);  // rank, or k_count for idle
  std::vector<ChannelId> assignment(m_count, kIdle);

  // Depth-first over members; each level carries the masks accumulated so far.
  const auto emit = [&](Mask selected, Mask busy) {
    const double p = mask_probability(selected, busy, plan.shared_channels,
                                      thetas);
    if (!(p > 0.0)) return;
    if (dist.tuples.size() >= cap)
      throw Error(ErrorKind::enumeration_limit,
                  "outcome enumeration exceeded its cap of " +
                      std::to_string(cap) + " tuples");
    OutcomeTuple t;
    t.assignment = assignment;
    t.prob = p;
    std::vector<std::pair<std::size_t, std::size_t>> ranked;
    for (std::size_t m = 0; m < m_count; ++m)
      if (choice[m] < k_count) ranked.emplace_back(choice[m], m);
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (i == 0 || ranked[i].first != ranked[i - 1].first)
        t.rank_groups.emplace_back();
      t.rank_groups.back().push_back(ranked[i].second);
    }
    dist.tuples.push_back(std::move(t));
  };

  const auto descend = [&](auto&& self, std::size_t m, Mask selected,
                           Mask busy) -> void {
    if (m == m_count) {
      emit(selected, busy);
      return;
    }
    for (std::size_t r = 0; r < k_count; ++r) {
      const Mask s = selected | bit(sp.slot_at[m][r]);
      const Mask b = busy | sp.prefix[m][r];
      if (s & b) continue;
      choice[m] = r;
      assignment[m] = plan.orderings[m][r];
      self(self, m + 1, s, b);
    }
    if (selected == 0) {
      choice[m] = k_count;
      assignment[m] = kIdle;
      self(self, m + 1, selected, sp.all);
    }
  };
  descend(descend, 0, 0, 0);
  return dist;
}

std::vector<std::vector<double>> transmit_marginals(
    const OutcomeDistribution& dist, std::size_t n_channels) {
  const std::size_t m_count = dist.coalition.size();
  std::vector<std::vector<double>> out(m_count,
                                       std::vector<double>(n_channels, 0.0));
  for (const auto& t : dist.tuples)
    for (std::size_t m = 0; m < m_count; ++m)
      if (t.assignment[m] != kIdle) out[m][t.assignment[m]] += t.prob;
  return out;
}

}  // namespace crn
