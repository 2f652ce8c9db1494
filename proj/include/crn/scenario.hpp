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

#ifndef CRN_SCENARIO_HPP
#define CRN_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace crn {

using SuId = std::size_t;
using ChannelId = std::size_t;

/// Largest network the bitmask-keyed caches support (SUs and channels).
inline constexpr std::size_t kMaxEntities = 64;

struct Channel {
  ChannelId id = 0;
  double theta = 0.0;  ///< probability the PU leaves the channel free
};

struct Position {
  double x = 0.0;  ///< meters, BS at the origin
  double y = 0.0;
};

double distance_to_bs(const Position& p) noexcept;

struct SecondaryUser {
  SuId id = 0;
  Position position;
  std::vector<ChannelId> known_channels;  ///< ascending channel ids
};

/// Physical constants. Powers in mW, distances in meters.
struct PhysParams {
  double p_max_mw = 10.0;
  double noise_mw = 1e-9;  ///< -90 dBm
  double mu = 3.0;
  double alpha = 0.05;
  double area_m = 3000.0;
  /// Use a^2 instead of the amplitude a in the gain formula.
  bool fading_power_gain = false;
  /// Distances are floored here so an SU sitting on the BS has finite gain.
  double min_distance_m = 1.0;

  void validate() const;
};

/// Row-major N x K matrices of fading amplitudes and resulting power gains.
class GainMatrix {
 public:
  GainMatrix() = default;
  GainMatrix(std::size_t n_sus, std::size_t n_channels,
             std::vector<double> amplitude);

  std::size_t n_sus() const noexcept { return n_sus_; }
  std::size_t n_channels() const noexcept { return n_channels_; }

  double amplitude(SuId su, ChannelId ch) const {
    return amplitude_[su * n_channels_ + ch];
  }
  double gain(SuId su, ChannelId ch) const {
    return gain_[su * n_channels_ + ch];
  }
  const std::vector<double>& amplitudes() const noexcept { return amplitude_; }

  /// Recomputes every gain from the stored amplitudes and SU distances.
  void update_gains(std::span<const Position> positions,
                    const PhysParams& phys);

 private:
  std::size_t n_sus_ = 0;
  std::size_t n_channels_ = 0;
  std::vector<double> amplitude_;
  std::vector<double> gain_;
};

/// Immutable world description.
class Scenario {
 public:
  Scenario(std::vector<Channel> channels, std::vector<SecondaryUser> sus,
           std::vector<double> amplitudes, PhysParams phys,
           std::uint64_t seed);

  std::size_t n_sus() const noexcept { return sus_.size(); }
  std::size_t n_channels() const noexcept { return channels_.size(); }

  const std::vector<Channel>& channels() const noexcept { return channels_; }
  const std::vector<SecondaryUser>& sus() const noexcept { return sus_; }
  const SecondaryUser& su(SuId id) const { return sus_.at(id); }
  const GainMatrix& gains() const noexcept { return gains_; }
  const PhysParams& phys() const noexcept { return phys_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Availability probabilities indexed by channel id.
  std::span<const double> thetas() const noexcept { return thetas_; }
  double theta(ChannelId ch) const { return thetas_.at(ch); }

  std::vector<Position> positions() const;

  /// Copies with one aspect of the world changed; gains are recomputed.
  Scenario with_positions(std::vector<Position> positions) const;
  Scenario with_thetas(std::span<const double> thetas) const;
  Scenario with_amplitudes(std::vector<double> amplitudes) const;
  Scenario with_alpha(double alpha) const;

  friend bool operator==(const Scenario& a, const Scenario& b);

 private:
  std::vector<Channel> channels_;
  std::vector<SecondaryUser> sus_;
  GainMatrix gains_;
  PhysParams phys_;
  std::uint64_t seed_ = 0;
  std::vector<double> thetas_;
};

/// Draws a random world. Positions, thetas, fading and knowledge subsets each
/// come from their own stream. `theta_list`, when given, fixes the thetas.
Scenario generate_scenario(std::size_t n_sus, std::size_t n_channels,
                           std::size_t k_i, const PhysParams& phys,
                           std::uint64_t seed,
                           std::optional<std::vector<double>> theta_list = {});

/// g = a * d^-mu (or a^2 * d^-mu with `fading_power_gain`).
double channel_gain(const Scenario& scenario, SuId su, ChannelId ch);

/// The gain formula on raw inputs.
double path_gain(double amplitude, double distance_m, const PhysParams& phys);

}  // namespace crn

#endif  // CRN_SCENARIO_HPP
