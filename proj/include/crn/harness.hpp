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

#ifndef CRN_HARNESS_HPP
#define CRN_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crn/dynamics.hpp"
#include "crn/formation.hpp"
#include "crn/scenario.hpp"
#include "crn/valuation.hpp"

namespace crn {

enum class Preset {
  simulate,
  sweep_n,
  sweep_alpha,
  sweep_k,
  sizes,
  traffic,
  mobility,
  snapshot,
  oracle,
};

std::string to_string(Preset preset);
/// Accepts both "sweep_n" and "sweep-n".
Preset preset_from_string(std::string_view name);

/// Optional experiment overrides read from the "experiment" config object.
struct ExperimentOptions {
  std::optional<std::vector<double>> grid;          ///< the preset's swept axis
  std::optional<std::vector<std::size_t>> n_values;  ///< mobility network sizes
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> optimal_up_to;
};

/// Everything a run needs.
struct SimConfig {
  std::size_t n_sus = 10;
  std::size_t n_channels = 14;
  std::size_t k_i = 3;
  PhysParams phys;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> theta_list;
  ValuationParams valuation;
  FormationParams formation;
  DynamicsParams dynamics;
  ExperimentOptions experiment;

  void validate() const;
};

/// Reads the flat scenario keys (n_sus, n_channels, k_i, alpha, p_max_mw,
/// noise_mw, mu, area_m, seed, theta_list, fading_power_gain) plus the
/// optional "solver", "valuation", "formation", "dynamics" and "experiment"
/// objects. Unknown keys and bad values raise invalid_config naming the key.
SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& config);
SimConfig load_config(const std::string& path);

Scenario make_scenario(const SimConfig& config, std::uint64_t seed);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

/// One grid point. Fields a preset does not sweep keep the base config value.
struct GridPoint {
  std::size_t n_sus = 0;
  std::size_t n_channels = 0;
  double alpha = 0.0;
  double speed_kmh = 0.0;
};

enum class Format { csv, json };

struct ExperimentSpec {
  Preset preset = Preset::simulate;
  SimConfig base;
  std::vector<GridPoint> grid;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = ".";
  Format format = Format::csv;
  unsigned jobs = 1;
  /// Exhaustive optimum for grid points with N <= this (0 disables).
  std::size_t optimal_up_to = 0;
  /// Wall-clock column; off by default so outputs stay byte-identical.
  bool record_timing = false;

  void validate() const;
};

/// Default grids mirror the figure protocols at desk scale.
ExperimentSpec default_spec(Preset preset, const SimConfig& base,
                            std::size_t n_seeds);

/// Replaces the swept axis of the preset with `values` (N, alpha, K or speed).
void override_grid(ExperimentSpec& spec, const std::vector<double>& values);

struct ResultRow {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double alpha = 0.0;
  double speed_kmh = 0.0;
  double mean_noncoop_payoff = 0.0;
  double mean_coop_payoff = 0.0;
  std::optional<double> optimal_welfare;
  double avg_coalition_size = 0.0;
  std::size_t max_coalition_size = 0;
  double avg_known_channels = 0.0;
  std::size_t max_known_channels = 0;
  std::size_t switch_count = 0;
  bool converged = true;
  bool nash_stable = true;
  std::optional<double> switch_frequency;  ///< per minute, dynamic presets
  std::optional<double> mean_lifespan_s;
  std::optional<double> runtime_ms;
};

/// Mean and standard error of one plotted quantity per x value.
struct SeriesPoint {
  double x = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

struct Series {
  std::string name;
  std::string x_label;
  std::vector<SeriesPoint> points;
};

struct ExperimentResult {
  Preset preset = Preset::simulate;
  std::vector<ResultRow> rows;  ///< sorted by grid keys, then seed
  std::vector<Series> series;
  /// Per-epoch records (traffic, mobility) or structured details (snapshot,
  /// simulate, oracle), one JSON object per line when written.
  std::vector<nlohmann::json> records;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// One formation from singletons plus the summary row.
struct SimulationOutcome {
  ResultRow row;
  FormationTrace trace;
  std::vector<double> noncoop_payoffs;
  std::vector<double> coop_payoffs;
};
SimulationOutcome simulate(const SimConfig& config, const Scenario& scenario,
                           std::size_t optimal_up_to = 0);

/// Writes `<out>/<preset>.csv|json`, one `<preset>_<series>.dat` per series
/// and `<preset>_records.jsonl` when there are records. Returns the paths.
std::vector<std::string> emit(const ExperimentResult& result, const ExperimentSpec& spec);

/// Column order of the row table.
const std::vector<std::string>& result_columns();

/// 12 significant digits, as used in every output file.
std::string format_number(double x);

}  // namespace crn

#endif  // CRN_HARNESS_HPP
