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

#ifndef CRN_DYNAMICS_HPP
#define CRN_DYNAMICS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crn/formation.hpp"
#include "crn/partition.hpp"
#include "crn/scenario.hpp"
#include "crn/valuation.hpp"

namespace crn {

struct DynamicsParams {
  double eta_seconds = 30.0;
  double duration_seconds = 150.0;
  double speed_kmh = 0.0;
  /// Period of availability re-draws; 0 disables them.
  double traffic_redraw_seconds = 0.0;
  /// Keep the initial fading amplitudes; otherwise re-draw them each epoch.
  bool freeze_fading = true;
  FormationParams formation;
  ValuationParams valuation;

  void validate() const;
};

/// One coalition of size > 1 and the time it existed with exactly these
/// members. `censored` marks coalitions still alive when the run ended.
struct Lifespan {
  Coalition members;
  double born_s = 0.0;
  double ended_s = 0.0;
  bool censored = false;

  double seconds() const { return ended_s - born_s; }
};

struct EpochRecord {
  std::size_t index = 0;  ///< 0 is the initial formation
  double time_s = 0.0;
  std::string fingerprint;
  std::size_t switches = 0;
  std::vector<Coalition> births;
  std::vector<Coalition> deaths;
  bool traffic_redrawn = false;
  bool converged = true;
  double mean_payoff = 0.0;
};

struct EpochMetrics {
  std::vector<std::size_t> switches_per_epoch;
  std::vector<Lifespan> lifespans;
  /// Switches after the initial formation.
  std::size_t adaptation_switches = 0;
  double duration_seconds = 0.0;

  /// Adaptation switches per minute of simulated time.
  double switch_frequency_per_minute() const;
};

struct DynamicsResult {
  std::vector<EpochRecord> epochs;
  std::vector<Partition> partitions;  ///< after each epoch's formation
  EpochMetrics metrics;
  Scenario final_scenario;
};

/// Forms coalitions from the all-singleton partition at t = 0, then at every
/// eta boundary strictly before the end of the run moves the SUs along a fresh
/// random heading (reflecting at the walls), re-draws availabilities on
/// traffic boundaries, refreshes gains and re-runs formation from the current
/// partition with empty histories.
DynamicsResult run_dynamics(const Scenario& scenario, const DynamicsParams& params,
                            std::uint64_t seed);

/// Mean lifespan in seconds, survivors counted up to the end of the run.
/// Empty when no coalition of size > 1 ever formed.
std::optional<double> lifespan_stats(const EpochMetrics& metrics);

/// Folds a coordinate back into [-half, half] by mirror reflection.
double reflect_into(double x, double half);

}  // namespace crn

#endif  // CRN_DYNAMICS_HPP
