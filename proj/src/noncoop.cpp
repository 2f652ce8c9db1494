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

#include "crn/noncoop.hpp"

#include <algorithm>
#include <cmath>

#include "crn/error.hpp"

namespace crn {

std::vector<ChannelId> order_by_weight(const Scenario& scenario, SuId su,
                                       std::span<const ChannelId> channels) {
  std::vector<ChannelId> out(channels.begin(), channels.end());
  const auto weight = [&](ChannelId k) {
    return channel_weight(scenario.theta(k), scenario.gains().gain(su, k));
  };
  std::sort(out.begin(), out.end(), [&](ChannelId a, ChannelId b) {
    const double wa = weight(a);
    const double wb = weight(b);
    if (wa != wb) return wa > wb;
    return a < b;
  });
  return out;
}

OrderedChannelList noncoop_order(const Scenario& scenario, SuId su) {
  const auto& known = scenario.su(su).known_channels;
  if (known.empty())
    throw Error(ErrorKind::invalid_input, "SU knows no channel");
  return {su, order_by_weight(scenario, su, known)};
}

double sensing_time(std::span<const ChannelId> ordered,
                    std::span<const double> thetas, double alpha) {
  double tau = 0.0;
  double all_busy = 1.0;
  for (std::size_t j = 0; j < ordered.size(); ++j) {
    const double theta = thetas[ordered[j]];
    tau += static_cast<double>(j + 1) * alpha * theta * all_busy;
    all_busy *= 1.0 - theta;
  }
  return tau + all_busy;
}

AccessProfile access_probabilities(std::span<const ChannelId> ordered,
                                   std::span<const double> thetas) {
  AccessProfile out;
  out.per_position.reserve(ordered.size());
  double busy = 1.0;
  for (ChannelId k : ordered) {
    out.per_position.push_back(thetas[k] * busy);
    busy *= 1.0 - thetas[k];
  }
  out.all_busy = busy;
  return out;
}

double noncoop_capacity(const Scenario& scenario, SuId su,
                        std::span<const ChannelId> ordered,
                        std::span<const double> ext_interference) {
  const auto& phys = scenario.phys();
  const auto access = access_probabilities(ordered, scenario.thetas());
  double capacity = 0.0;
  for (std::size_t j = 0; j < ordered.size(); ++j) {
    const ChannelId k = ordered[j];
    const double sinr = scenario.gains().gain(su, k) * phys.p_max_mw /
                        (phys.noise_mw + ext_interference[k]);
    capacity += access.per_position[j] * std::log2(1.0 + sinr);
  }
  return capacity;
}

double noncoop_utility(const Scenario& scenario, SuId su,
                       std::span<const double> ext_interference) {
  const auto order = noncoop_order(scenario, su);
  const double c =
      noncoop_capacity(scenario, su, order.channels, ext_interference);
  const double tau =
      sensing_time(order.channels, scenario.thetas(), scenario.phys().alpha);
  return c * (1.0 - tau);
}

std::vector<InterferenceEstimate> noncoop_external_interference(
    const Scenario& scenario) {
  const std::size_t n = scenario.n_sus();
  const std::size_t k_total = scenario.n_channels();
  const double p = scenario.phys().p_max_mw;

  // Received power each SU contributes on each channel.
  std::vector<std::vector<double>> emitted(n, std::vector<double>(k_total, 0.0));
  for (SuId j = 0; j < n; ++j) {
    const auto order = noncoop_order(scenario, j);
    const auto access = access_probabilities(order.channels, scenario.thetas());
    for (std::size_t pos = 0; pos < order.channels.size(); ++pos) {
      const ChannelId k = order.channels[pos];
      emitted[j][k] = scenario.gains().gain(j, k) * p * access.per_position[pos];
    }
  }
  std::vector<InterferenceEstimate> out(n, InterferenceEstimate(k_total, 0.0));
  for (SuId i = 0; i < n; ++i)
    for (SuId j = 0; j < n; ++j) {
      if (j == i) continue;
      for (ChannelId k = 0; k < k_total; ++k) out[i][k] += emitted[j][k];
    }
  return out;
}

std::vector<double> noncoop_utilities(const Scenario& scenario) {
  const auto interference = noncoop_external_interference(scenario);
  std::vector<double> out(scenario.n_sus());
  for (SuId i = 0; i < scenario.n_sus(); ++i)
    out[i] = noncoop_utility(scenario, i, interference[i]);
  return out;
}

}  // namespace crn
