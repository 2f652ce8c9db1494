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

#include "crn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "crn/error.hpp"
#include "crn/rng.hpp"

namespace crn {

double distance_to_bs(const Position& p) noexcept {
  return std::hypot(p.x, p.y);
}

void PhysParams::validate() const {
  if (!(p_max_mw > 0.0))
    throw Error(ErrorKind::invalid_config, "p_max_mw must be positive",
                "p_max_mw");
  if (!(noise_mw > 0.0))
    throw Error(ErrorKind::invalid_config, "noise_mw must be positive",
                "noise_mw");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::invalid_config, "alpha must lie in (0, 1)",
                "alpha");
  if (!(area_m > 0.0))
    throw Error(ErrorKind::invalid_config, "area_m must be positive", "area_m");
  if (!(mu >= 0.0))
    throw Error(ErrorKind::invalid_config, "mu must be non-negative", "mu");
  if (!(min_distance_m > 0.0))
    throw Error(ErrorKind::invalid_config, "min_distance_m must be positive",
                "min_distance_m");
}

double path_gain(double amplitude, double distance_m, const PhysParams& phys) {
  const double a = phys.fading_power_gain ? amplitude * amplitude : amplitude;
  const double d = std::max(distance_m, phys.min_distance_m);
  return a * std::pow(d, -phys.mu);
}

GainMatrix::GainMatrix(std::size_t n_sus, std::size_t n_channels,
                       std::vector<double> amplitude)
    : n_sus_(n_sus),
      n_channels_(n_channels),
      amplitude_(std::move(amplitude)),
      gain_(n_sus * n_channels, 0.0) {
  if (amplitude_.size() != n_sus * n_channels)
    throw Error(ErrorKind::invalid_input, "amplitude matrix has wrong size");
  for (double a : amplitude_)
    if (!(a > 0.0))
      throw Error(ErrorKind::invalid_input,
                  "fading amplitudes must be strictly positive");
}

void GainMatrix::update_gains(std::span<const Position> positions,
                              const PhysParams& phys) {
  for (SuId i = 0; i < n_sus_; ++i) {
    const double d = distance_to_bs(positions[i]);
    for (ChannelId k = 0; k < n_channels_; ++k)
      gain_[i * n_channels_ + k] =
          path_gain(amplitude_[i * n_channels_ + k], d, phys);
  }
}

Scenario::Scenario(std::vector<Channel> channels,
                   std::vector<SecondaryUser> sus,
                   std::vector<double> amplitudes, PhysParams phys,
                   std::uint64_t seed)
    : channels_(std::move(channels)),
      sus_(std::move(sus)),
      gains_(sus_.size(), channels_.size(), std::move(amplitudes)),
      phys_(phys),
      seed_(seed) {
  phys_.validate();
  if (sus_.empty() || channels_.empty())
    throw Error(ErrorKind::invalid_config,
                "a scenario needs at least one SU and one channel");
  if (sus_.size() > kMaxEntities)
    throw Error(ErrorKind::invalid_config, "too many SUs", "n_sus");
  if (channels_.size() > kMaxEntities)
    throw Error(ErrorKind::invalid_config, "too many channels", "n_channels");
  thetas_.reserve(channels_.size());
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    if (channels_[k].id != k)
      throw Error(ErrorKind::invalid_input, "channel ids must be 0..K-1");
    const double t = channels_[k].theta;
    if (!(t >= 0.0 && t <= 1.0))
      throw Error(ErrorKind::invalid_config, "theta must lie in [0, 1]",
                  "theta_list");
    thetas_.push_back(t);
  }
  const double half = phys_.area_m / 2.0;
  for (std::size_t i = 0; i < sus_.size(); ++i) {
    auto& su = sus_[i];
    if (su.id != i) throw Error(ErrorKind::invalid_input, "SU ids must be 0..N-1");
    if (std::abs(su.position.x) > half || std::abs(su.position.y) > half)
      throw Error(ErrorKind::invalid_input,
                  "SU " + std::to_string(i) + " lies outside the area");
    std::sort(su.known_channels.begin(), su.known_channels.end());
    if (std::adjacent_find(su.known_channels.begin(), su.known_channels.end()) !=
        su.known_channels.end())
      throw Error(ErrorKind::invalid_input, "duplicate known channel");
    for (ChannelId k : su.known_channels)
      if (k >= channels_.size())
        throw Error(ErrorKind::invalid_input,
                    "SU " + std::to_string(i) + " knows unknown channel " +
                        std::to_string(k));
  }
  gains_.update_gains(positions(), phys_);
}

std::vector<Position> Scenario::positions() const {
  std::vector<Position> out;
  out.reserve(sus_.size());
  for (const auto& su : sus_) out.push_back(su.position);
  return out;
}

Scenario Scenario::with_positions(std::vector<Position> positions) const {
  if (positions.size() != sus_.size())
    throw Error(ErrorKind::invalid_input, "position count mismatch");
  auto sus = sus_;
  for (std::size_t i = 0; i < sus.size(); ++i) sus[i].position = positions[i];
  return Scenario(channels_, std::move(sus), gains_.amplitudes(), phys_, seed_);
}

Scenario Scenario::with_thetas(std::span<const double> thetas) const {
  if (thetas.size() != channels_.size())
    throw Error(ErrorKind::invalid_input, "theta count mismatch");
  auto channels = channels_;
  for (std::size_t k = 0; k < channels.size(); ++k)
    channels[k].theta = thetas[k];
  return Scenario(std::move(channels), sus_, gains_.amplitudes(), phys_, seed_);
}

Scenario Scenario::with_amplitudes(std::vector<double> amplitudes) const {
  return Scenario(channels_, sus_, std::move(amplitudes), phys_, seed_);
}

Scenario Scenario::with_alpha(double alpha) const {
  auto phys = phys_;
  phys.alpha = alpha;
  return Scenario(channels_, sus_, gains_.amplitudes(), phys, seed_);
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.seed_ != b.seed_ || a.n_sus() != b.n_sus() ||
      a.n_channels() != b.n_channels())
    return false;
  for (std::size_t k = 0; k < a.n_channels(); ++k)
    if (a.channels_[k].theta != b.channels_[k].theta) return false;
  for (std::size_t i = 0; i < a.n_sus(); ++i) {
    const auto& x = a.sus_[i];
    const auto& y = b.sus_[i];
    if (x.position.x != y.position.x || x.position.y != y.position.y ||
        x.known_channels != y.known_channels)
      return false;
  }
  const auto& p = a.phys_;
  const auto& q = b.phys_;
  return a.gains_.amplitudes() == b.gains_.amplitudes() &&
         p.p_max_mw == q.p_max_mw && p.noise_mw == q.noise_mw &&
         p.mu == q.mu && p.alpha == q.alpha && p.area_m == q.area_m &&
         p.fading_power_gain == q.fading_power_gain &&
         p.min_distance_m == q.min_distance_m;
}

Scenario generate_scenario(std::size_t n_sus, std::size_t n_channels,
                           std::size_t k_i, const PhysParams& phys,
                           std::uint64_t seed,
                           std::optional<std::vector<double>> theta_list) {
  phys.validate();
  if (n_sus == 0)
    throw Error(ErrorKind::invalid_config, "n_sus must be at least 1", "n_sus");
  if (n_channels == 0)
    throw Error(ErrorKind::invalid_config, "n_channels must be at least 1",
                "n_channels");
  if (k_i == 0 || k_i > n_channels)
    throw Error(ErrorKind::invalid_config,
                "k_i must lie in [1, n_channels]", "k_i");
  if (theta_list && theta_list->size() != n_channels)
    throw Error(ErrorKind::invalid_config,
                "theta_list must have n_channels entries", "theta_list");

  std::vector<Channel> channels(n_channels);
  Rng theta_rng(seed, Stream::thetas);
  for (std::size_t k = 0; k < n_channels; ++k) {
    channels[k].id = k;
    channels[k].theta = theta_list ? (*theta_list)[k] : theta_rng.uniform();
  }

  const double half = phys.area_m / 2.0;
  Rng pos_rng(seed, Stream::positions);
  Rng subset_rng(seed, Stream::subsets);
  std::vector<SecondaryUser> sus(n_sus);
  std::vector<ChannelId> pool(n_channels);
  for (std::size_t i = 0; i < n_sus; ++i) {
    sus[i].id = i;
    sus[i].position.x = pos_rng.uniform(-half, half);
    sus[i].position.y = pos_rng.uniform(-half, half);
    // Partial Fisher-Yates: the first k_i slots form a uniform k_i-subset.
    std::iota(pool.begin(), pool.end(), ChannelId{0});
    for (std::size_t j = 0; j < k_i; ++j)
      std::swap(pool[j], pool[j + subset_rng.below(n_channels - j)]);
    sus[i].known_channels.assign(pool.begin(), pool.begin() + k_i);
  }

  Rng fading_rng(seed, Stream::fading);
  std::vector<double> amplitudes(n_sus * n_channels);
  for (double& a : amplitudes) {
    a = fading_rng.rayleigh();
    while (!(a > 0.0)) a = fading_rng.rayleigh();
  }
  return Scenario(std::move(channels), std::move(sus), std::move(amplitudes),
                  phys, seed);
}

double channel_gain(const Scenario& scenario, SuId su, ChannelId ch) {
  if (su >= scenario.n_sus() || ch >= scenario.n_channels())
    throw Error(ErrorKind::invalid_input, "SU or channel id out of range");
  return scenario.gains().gain(su, ch);
}

}  // namespace crn
