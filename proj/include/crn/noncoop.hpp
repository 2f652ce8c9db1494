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

#ifndef CRN_NONCOOP_HPP
#define CRN_NONCOOP_HPP

#include <span>
#include <vector>

#include "crn/scenario.hpp"

namespace crn {

/// Channels in sensing order for one SU.
struct OrderedChannelList {
  SuId su = 0;
  std::vector<ChannelId> channels;
};

/// Per-channel average external interference in mW, indexed by channel id.
using InterferenceEstimate = std::vector<double>;

/// Probability of transmitting on each position of an ordered list, plus the
/// mass of the slot where every channel is busy.
struct AccessProfile {
  std::vector<double> per_position;
  double all_busy = 1.0;
};

inline double channel_weight(double theta, double gain) noexcept {
  return theta * gain;
}

/// Sorts `channels` by descending weight theta*g for `su`; equal weights keep
/// ascending channel id.
std::vector<ChannelId> order_by_weight(const Scenario& scenario, SuId su,
                                       std::span<const ChannelId> channels);

OrderedChannelList noncoop_order(const Scenario& scenario, SuId su);

/// Average fraction of a slot spent sensing: position j (1-based) costs
/// j*alpha when it is the first free channel; an all-busy slot is lost.
double sensing_time(std::span<const ChannelId> ordered,
                    std::span<const double> thetas, double alpha);

AccessProfile access_probabilities(std::span<const ChannelId> ordered,
                                   std::span<const double> thetas);

/// Expected capacity (bits/s/Hz) at full power under the given average
/// interference.
double noncoop_capacity(const Scenario& scenario, SuId su,
                        std::span<const ChannelId> ordered,
                        std::span<const double> ext_interference);

/// C * (1 - tau) with the weight ordering.
double noncoop_utility(const Scenario& scenario, SuId su,
                       std::span<const double> ext_interference);

/// Expected interference each SU sees when everyone acts alone:
/// I[i][k] = sum_{j != i} g_jk * P * Pr_j(access k).
std::vector<InterferenceEstimate> noncoop_external_interference(
    const Scenario& scenario);

/// Every SU's non-cooperative utility under the all-singleton interference.
std::vector<double> noncoop_utilities(const Scenario& scenario);

}  // namespace crn

#endif  // CRN_NONCOOP_HPP
