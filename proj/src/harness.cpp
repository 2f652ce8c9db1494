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

#include "crn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "crn/error.hpp"
#include "crn/noncoop.hpp"
#include "crn_oracles/suites.hpp"

namespace crn {

using nlohmann::json;

namespace {

constexpr std::pair<Preset, std::string_view> kPresetNames[] = {
    {Preset::simulate, "simulate"},       {Preset::sweep_n, "sweep_n"},
    {Preset::sweep_alpha, "sweep_alpha"}, {Preset::sweep_k, "sweep_k"},
    {Preset::sizes, "sizes"},             {Preset::traffic, "traffic"},
    {Preset::mobility, "mobility"},       {Preset::snapshot, "snapshot"},
    {Preset::oracle, "oracle"},
};

// Availability probabilities of the illustrative 9-SU, 14-channel snapshot.
const std::vector<double> kSnapshotThetas = {0.98, 0.22, 0.64, 0.81, 0.058,
                                             0.048, 0.067, 0.94, 0.18, 0.25,
                                             0.17, 0.15, 0.23, 0.36};

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::invalid_config, key + ": " + why, key);
}

template <typename T>
T read(const json& j, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!j.is_number_unsigned() &&
          !(j.is_number_integer() && j.template get<std::int64_t>() >= 0))
        bad_key(key, "expected a non-negative integer");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!j.is_number()) bad_key(key, "expected a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) bad_key(key, "expected true or false");
    }
    return j.template get<T>();
  } catch (const json::exception& e) {
    bad_key(key, e.what());
  }
}

template <typename T>
std::vector<T> read_list(const json& j, const std::string& key) {
  if (!j.is_array()) bad_key(key, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(read<T>(j[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

void require_object(const json& j, const std::string& key) {
  if (!j.is_object()) bad_key(key, "expected an object");
}

void read_solver(const json& j, SolverParams& s) {
  require_object(j, "solver");
  for (const auto& [k, v] : j.items()) {
    const std::string key = "solver." + k;
    if (k == "damping") s.damping = read<double>(v, key);
    else if (k == "tolerance") s.tolerance = read<double>(v, key);
    else if (k == "max_sweeps") s.max_sweeps = read<std::size_t>(v, key);
    else if (k == "vertex_start_limit") s.vertex_start_limit = read<std::size_t>(v, key);
    else if (k == "polish_iterations") s.polish_iterations = read<std::size_t>(v, key);
    else if (k == "polished_corners") s.polished_corners = read<std::size_t>(v, key);
    else bad_key(key, "unknown key");
  }
}

void read_valuation(const json& j, ValuationParams& p) {
  require_object(j, "valuation");
  for (const auto& [k, v] : j.items()) {
    const std::string key = "valuation." + k;
    if (k == "enumeration_cap") p.enumeration_cap = read<std::size_t>(v, key);
    else if (k == "fixed_point_rounds") p.fixed_point_rounds = read<std::size_t>(v, key);
    else if (k == "fixed_point_damping") p.fixed_point_damping = read<double>(v, key);
    else bad_key(key, "unknown key");
  }
}

void read_formation(const json& j, FormationParams& p) {
  require_object(j, "formation");
  for (const auto& [k, v] : j.items()) {
    const std::string key = "formation." + k;
    if (k == "max_passes") p.max_passes = read<std::size_t>(v, key);
    else if (k == "reset_history_on_quiescence")
      p.reset_history_on_quiescence = read<bool>(v, key);
    else if (k == "forbid_revisits") p.forbid_revisits = read<bool>(v, key);
    else if (k == "restart_when_blocked") p.restart_when_blocked = read<bool>(v, key);
    else if (k == "resets_per_attempt") p.resets_per_attempt = read<std::size_t>(v, key);
    else bad_key(key, "unknown key");
  }
}

void read_dynamics(const json& j, DynamicsParams& p) {
  require_object(j, "dynamics");
  for (const auto& [k, v] : j.items()) {
    const std::string key = "dynamics." + k;
    if (k == "eta_seconds") p.eta_seconds = read<double>(v, key);
    else if (k == "duration_seconds") p.duration_seconds = read<double>(v, key);
    else if (k == "speed_kmh") p.speed_kmh = read<double>(v, key);
    else if (k == "traffic_redraw_seconds") p.traffic_redraw_seconds = read<double>(v, key);
    else if (k == "freeze_fading") p.freeze_fading = read<bool>(v, key);
    else bad_key(key, "unknown key");
  }
}

void read_experiment(const json& j, ExperimentOptions& e) {
  require_object(j, "experiment");
  for (const auto& [k, v] : j.items()) {
    const std::string key = "experiment." + k;
    if (k == "grid") e.grid = read_list<double>(v, key);
    else if (k == "n_values") e.n_values = read_list<std::size_t>(v, key);
    else if (k == "seeds") e.seeds = read<std::size_t>(v, key);
    else if (k == "optimal_up_to") e.optimal_up_to = read<std::size_t>(v, key);
    else bad_key(key, "unknown key");
  }
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Coalition size statistics and pooled-knowledge statistics of a partition.
void describe_partition(const Scenario& sc, const Partition& p, ResultRow& row) {
  std::size_t biggest = 0;
  double known_sum = 0.0;
  std::size_t known_max = 0;
  for (const auto& c : p.coalitions()) {
    biggest = std::max(biggest, c.size());
    std::set<ChannelId> pooled;
    for (SuId su : c)
      pooled.insert(sc.su(su).known_channels.begin(), sc.su(su).known_channels.end());
    known_sum += static_cast<double>(pooled.size() * c.size());
    known_max = std::max(known_max, pooled.size());
  }
  row.avg_coalition_size =
      static_cast<double>(p.n_sus()) / static_cast<double>(p.size());
  row.max_coalition_size = biggest;
  row.avg_known_channels = known_sum / static_cast<double>(p.n_sus());
  row.max_known_channels = known_max;
}

json coalition_json(const Coalition& c) { return json(c); }

// Runs fn(i) for i in [0, count) on `jobs` threads. Each task writes only its
// own slot, so assembly is independent of scheduling. The first failure (by
// index) is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double axis_value(Preset preset, const ResultRow& r) {
  switch (preset) {
    case Preset::sweep_alpha: return r.alpha;
    case Preset::sweep_k: return static_cast<double>(r.k);
    case Preset::mobility: return r.speed_kmh;
    default: return static_cast<double>(r.n);
  }
}

std::string axis_label(Preset preset) {
  switch (preset) {
    case Preset::sweep_alpha: return "alpha";
    case Preset::sweep_k: return "K";
    case Preset::mobility: return "speed_kmh";
    case Preset::traffic: return "time_s";
    default: return "N";
  }
}

Series make_series(std::string name, std::string x_label,
                   const std::map<double, std::vector<double>>& samples) {
  Series s{std::move(name), std::move(x_label), {}};
  for (const auto& [x, v] : samples) {
    if (v.empty()) continue;
    const double m = mean(v);
    double var = 0.0;
    for (double y : v) var += (y - m) * (y - m);
    const double se = v.size() > 1
                          ? std::sqrt(var / static_cast<double>(v.size() - 1)) /
                                std::sqrt(static_cast<double>(v.size()))
                          : 0.0;
    s.points.push_back({x, m, se, v.size()});
  }
  return s;
}

std::vector<Series> build_series(Preset preset, const std::vector<ResultRow>& rows,
                                 const std::vector<json>& records) {
  std::vector<Series> out;
  const std::string label = axis_label(preset);
  using Samples = std::map<double, std::vector<double>>;
  const auto collect = [&](auto pick, std::optional<std::size_t> only_n = {}) {
    Samples s;
    for (const auto& r : rows) {
      if (only_n && r.n != *only_n) continue;
      if (auto y = pick(r)) s[axis_value(preset, r)].push_back(*y);
    }
    return s;
  };
  const auto coop = [](const ResultRow& r) { return std::optional(r.mean_coop_payoff); };
  const auto noncoop = [](const ResultRow& r) { return std::optional(r.mean_noncoop_payoff); };

  switch (preset) {
    case Preset::sweep_n:
    case Preset::sweep_alpha:
    case Preset::sweep_k: {
      out.push_back(make_series("coop_payoff", label, collect(coop)));
      out.push_back(make_series("noncoop_payoff", label, collect(noncoop)));
      const auto optimal = collect([](const ResultRow& r) -> std::optional<double> {
        if (!r.optimal_welfare) return std::nullopt;
        return *r.optimal_welfare / static_cast<double>(r.n);
      });
      if (!optimal.empty()) out.push_back(make_series("optimal_payoff", label, optimal));
      break;
    }
    case Preset::sizes:
      out.push_back(make_series("avg_coalition_size", label, collect([](const ResultRow& r) {
                                  return std::optional(r.avg_coalition_size);
                                })));
      out.push_back(make_series("max_coalition_size", label, collect([](const ResultRow& r) {
                                  return std::optional(static_cast<double>(r.max_coalition_size));
                                })));
      out.push_back(make_series("avg_known_channels", label, collect([](const ResultRow& r) {
                                  return std::optional(r.avg_known_channels);
                                })));
      out.push_back(make_series("max_known_channels", label, collect([](const ResultRow& r) {
                                  return std::optional(static_cast<double>(r.max_known_channels));
                                })));
      break;
    case Preset::mobility: {
      std::set<std::size_t> sizes;
      for (const auto& r : rows) sizes.insert(r.n);
      for (std::size_t n : sizes) {
        out.push_back(make_series("switch_frequency_n" + std::to_string(n), label,
                                  collect([](const ResultRow& r) { return r.switch_frequency; }, n)));
        out.push_back(make_series("lifespan_n" + std::to_string(n), label,
                                  collect([](const ResultRow& r) { return r.mean_lifespan_s; }, n)));
      }
      break;
    }
    case Preset::traffic: {
      Samples coalitions;
      Samples switches;
      for (const auto& rec : records) {
        const double t = rec.at("time_s").get<double>();
        coalitions[t].push_back(rec.at("coalitions").get<double>());
        switches[t].push_back(rec.at("switches").get<double>());
      }
      out.push_back(make_series("coalition_count", label, coalitions));
      out.push_back(make_series("switches", label, switches));
      break;
    }
    default:
      break;
  }
  return out;
}

json row_json(const ResultRow& r);

}  // namespace

std::string to_string(Preset preset) {
  for (const auto& [p, name] : kPresetNames)
    if (p == preset) return std::string(name);
  return "unknown";
}

Preset preset_from_string(std::string_view name) {
  std::string normalized(name);
  std::replace(normalized.begin(), normalized.end(), '-', '_');
  for (const auto& [p, n] : kPresetNames)
    if (n == normalized) return p;
  throw Error(ErrorKind::invalid_config, "unknown preset '" + std::string(name) + "'",
              "preset");
}

void SimConfig::validate() const {
  if (n_sus == 0) bad_key("n_sus", "must be at least 1");
  if (n_sus > kMaxEntities) bad_key("n_sus", "at most 64 SUs are supported");
  if (n_channels == 0) bad_key("n_channels", "must be at least 1");
  if (n_channels > kMaxEntities) bad_key("n_channels", "at most 64 channels are supported");
  if (k_i == 0 || k_i > n_channels) bad_key("k_i", "must be in [1, n_channels]");
  phys.validate();
  if (theta_list) {
    if (theta_list->size() != n_channels)
      bad_key("theta_list", "needs one value per channel");
    for (double t : *theta_list)
      if (!(t >= 0.0 && t <= 1.0)) bad_key("theta_list", "values must lie in [0, 1]");
  }
  if (!(valuation.solver.damping > 0.0 && valuation.solver.damping <= 1.0))
    bad_key("solver.damping", "must lie in (0, 1]");
  if (valuation.enumeration_cap == 0) bad_key("valuation.enumeration_cap", "must be positive");
  if (!(valuation.fixed_point_damping > 0.0 && valuation.fixed_point_damping <= 1.0))
    bad_key("valuation.fixed_point_damping", "must lie in (0, 1]");
  dynamics.validate();
  if (experiment.grid && experiment.grid->empty()) bad_key("experiment.grid", "is empty");
  if (experiment.seeds && *experiment.seeds == 0) bad_key("experiment.seeds", "must be positive");
  if (experiment.optimal_up_to && *experiment.optimal_up_to > kOptimalSearchMaxSus)
    bad_key("experiment.optimal_up_to", "exhaustive search is limited to 8 SUs");
}

SimConfig config_from_json(const json& j) {
  require_object(j, "config");
  SimConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "n_sus") c.n_sus = read<std::size_t>(v, k);
    else if (k == "n_channels") c.n_channels = read<std::size_t>(v, k);
    else if (k == "k_i") c.k_i = read<std::size_t>(v, k);
    else if (k == "alpha") c.phys.alpha = read<double>(v, k);
    else if (k == "p_max_mw") c.phys.p_max_mw = read<double>(v, k);
    else if (k == "noise_mw") c.phys.noise_mw = read<double>(v, k);
    else if (k == "mu") c.phys.mu = read<double>(v, k);
    else if (k == "area_m") c.phys.area_m = read<double>(v, k);
    else if (k == "min_distance_m") c.phys.min_distance_m = read<double>(v, k);
    else if (k == "fading_power_gain") c.phys.fading_power_gain = read<bool>(v, k);
    else if (k == "seed") c.seed = read<std::uint64_t>(v, k);
    else if (k == "theta_list") {
      if (!v.is_null()) c.theta_list = read_list<double>(v, k);
    } else if (k == "solver") read_solver(v, c.valuation.solver);
    else if (k == "valuation") read_valuation(v, c.valuation);
    else if (k == "formation") read_formation(v, c.formation);
    else if (k == "dynamics") read_dynamics(v, c.dynamics);
    else if (k == "experiment") read_experiment(v, c.experiment);
    else bad_key(k, "unknown key");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_config) throw;
    throw Error(ErrorKind::invalid_config, e.what(), e.key());
  }
  return c;
}

json config_to_json(const SimConfig& c) {
  json j;
  j["n_sus"] = c.n_sus;
  j["n_channels"] = c.n_channels;
  j["k_i"] = c.k_i;
  j["alpha"] = c.phys.alpha;
  j["p_max_mw"] = c.phys.p_max_mw;
  j["noise_mw"] = c.phys.noise_mw;
  j["mu"] = c.phys.mu;
  j["area_m"] = c.phys.area_m;
  j["min_distance_m"] = c.phys.min_distance_m;
  j["fading_power_gain"] = c.phys.fading_power_gain;
  j["seed"] = c.seed;
  j["theta_list"] = c.theta_list ? json(*c.theta_list) : json(nullptr);
  const auto& s = c.valuation.solver;
  j["solver"] = {{"damping", s.damping},
                 {"tolerance", s.tolerance},
                 {"max_sweeps", s.max_sweeps},
                 {"vertex_start_limit", s.vertex_start_limit},
                 {"polish_iterations", s.polish_iterations},
                 {"polished_corners", s.polished_corners}};
  j["valuation"] = {{"enumeration_cap", c.valuation.enumeration_cap},
                    {"fixed_point_rounds", c.valuation.fixed_point_rounds},
                    {"fixed_point_damping", c.valuation.fixed_point_damping}};
  j["formation"] = {{"max_passes", c.formation.max_passes},
                    {"reset_history_on_quiescence", c.formation.reset_history_on_quiescence},
                    {"forbid_revisits", c.formation.forbid_revisits},
                    {"restart_when_blocked", c.formation.restart_when_blocked},
                    {"resets_per_attempt", c.formation.resets_per_attempt}};
  j["dynamics"] = {{"eta_seconds", c.dynamics.eta_seconds},
                   {"duration_seconds", c.dynamics.duration_seconds},
                   {"speed_kmh", c.dynamics.speed_kmh},
                   {"traffic_redraw_seconds", c.dynamics.traffic_redraw_seconds},
                   {"freeze_fading", c.dynamics.freeze_fading}};
  json e = json::object();
  if (c.experiment.grid) e["grid"] = *c.experiment.grid;
  if (c.experiment.n_values) e["n_values"] = *c.experiment.n_values;
  if (c.experiment.seeds) e["seeds"] = *c.experiment.seeds;
  if (c.experiment.optimal_up_to) e["optimal_up_to"] = *c.experiment.optimal_up_to;
  j["experiment"] = e;
  return j;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config file '" + path + "'", "config");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::invalid_config, std::string("config is not valid JSON: ") + e.what(),
                "config");
  }
  return config_from_json(j);
}

Scenario make_scenario(const SimConfig& config, std::uint64_t seed) {
  return generate_scenario(config.n_sus, config.n_channels, config.k_i, config.phys, seed,
                           config.theta_list);
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["seed"] = sc.seed();
  const auto& p = sc.phys();
  j["phys"] = {{"p_max_mw", p.p_max_mw}, {"noise_mw", p.noise_mw},
               {"mu", p.mu},             {"alpha", p.alpha},
               {"area_m", p.area_m},     {"fading_power_gain", p.fading_power_gain},
               {"min_distance_m", p.min_distance_m}};
  json thetas = json::array();
  for (const auto& ch : sc.channels()) thetas.push_back(ch.theta);
  j["thetas"] = thetas;
  json sus = json::array();
  for (const auto& su : sc.sus())
    sus.push_back({{"x", su.position.x}, {"y", su.position.y}, {"known", su.known_channels}});
  j["sus"] = sus;
  json amps = json::array();
  for (SuId i = 0; i < sc.n_sus(); ++i) {
    json row = json::array();
    for (ChannelId k = 0; k < sc.n_channels(); ++k) row.push_back(sc.gains().amplitude(i, k));
    amps.push_back(row);
  }
  j["amplitudes"] = amps;
  return j;
}

Scenario scenario_from_json(const json& j) {
  try {
    PhysParams p;
    const auto& jp = j.at("phys");
    p.p_max_mw = jp.at("p_max_mw").get<double>();
    p.noise_mw = jp.at("noise_mw").get<double>();
    p.mu = jp.at("mu").get<double>();
    p.alpha = jp.at("alpha").get<double>();
    p.area_m = jp.at("area_m").get<double>();
    p.fading_power_gain = jp.at("fading_power_gain").get<bool>();
    p.min_distance_m = jp.value("min_distance_m", 1.0);

    std::vector<Channel> channels;
    const auto thetas = j.at("thetas").get<std::vector<double>>();
    for (std::size_t k = 0; k < thetas.size(); ++k) channels.push_back({k, thetas[k]});

    std::vector<SecondaryUser> sus;
    for (const auto& js : j.at("sus")) {
      SecondaryUser su;
      su.id = sus.size();
      su.position = {js.at("x").get<double>(), js.at("y").get<double>()};
      su.known_channels = js.at("known").get<std::vector<ChannelId>>();
      sus.push_back(std::move(su));
    }
    std::vector<double> amplitudes;
    for (const auto& row : j.at("amplitudes"))
      for (const auto& a : row) amplitudes.push_back(a.get<double>());
    return Scenario(std::move(channels), std::move(sus), std::move(amplitudes), p,
                    j.at("seed").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed scenario: ") + e.what(),
                "scenario");
  }
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  out << scenario_to_json(scenario).dump(2) << '\n';
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path + "'");
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open scenario file '" + path + "'");
  try {
    return scenario_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::invalid_input, std::string("scenario is not valid JSON: ") + e.what(),
                "scenario");
  }
}

void ExperimentSpec::validate() const {
  if (preset != Preset::oracle && grid.empty())
    throw Error(ErrorKind::invalid_config, "experiment grid is empty", "grid");
  if (seeds.empty()) throw Error(ErrorKind::invalid_config, "no seeds given", "seeds");
  if (jobs == 0) throw Error(ErrorKind::invalid_config, "jobs must be positive", "jobs");
  for (const auto& g : grid) {
    SimConfig c = base;
    c.n_sus = g.n_sus;
    c.n_channels = g.n_channels;
    c.phys.alpha = g.alpha;
    if (c.theta_list && c.theta_list->size() != c.n_channels) c.theta_list.reset();
    c.validate();
    if (g.speed_kmh < 0.0) bad_key("speed_kmh", "must be non-negative");
  }
}

ExperimentSpec default_spec(Preset preset, const SimConfig& base, std::size_t n_seeds) {
  ExperimentSpec spec;
  spec.preset = preset;
  spec.base = base;
  const std::size_t seed_count = base.experiment.seeds.value_or(n_seeds);
  for (std::size_t i = 0; i < seed_count; ++i) spec.seeds.push_back(base.seed + i);

  const GridPoint here{base.n_sus, base.n_channels, base.phys.alpha, 0.0};
  switch (preset) {
    case Preset::simulate:
    case Preset::oracle:
      spec.grid = {here};
      break;
    case Preset::sweep_n:
    case Preset::sizes:
      for (std::size_t n = 4; n <= 20; n += 2) spec.grid.push_back({n, base.n_channels, base.phys.alpha, 0.0});
      spec.optimal_up_to = preset == Preset::sweep_n ? 8 : 0;
      break;
    case Preset::sweep_alpha:
      for (int i = 1; i <= 10; ++i)
        spec.grid.push_back({base.n_sus, base.n_channels, 0.05 * i, 0.0});
      break;
    case Preset::sweep_k:
      for (std::size_t k = 10; k <= 20; k += 2) spec.grid.push_back({base.n_sus, k, base.phys.alpha, 0.0});
      break;
    case Preset::traffic:
      spec.grid = {here};
      spec.base.dynamics.eta_seconds = 60.0;
      spec.base.dynamics.duration_seconds = 300.0;
      spec.base.dynamics.traffic_redraw_seconds = 60.0;
      spec.base.dynamics.speed_kmh = 0.0;
      break;
    case Preset::mobility: {
      spec.base.dynamics.eta_seconds = 30.0;
      spec.base.dynamics.duration_seconds = 150.0;
      spec.base.dynamics.traffic_redraw_seconds = 0.0;
      spec.base.dynamics.freeze_fading = true;
      const auto sizes = base.experiment.n_values.value_or(std::vector<std::size_t>{10, 15});
      for (std::size_t n : sizes)
        for (double v : {18.0, 36.0, 54.0, 72.0})
          spec.grid.push_back({n, base.n_channels, base.phys.alpha, v});
      break;
    }
    case Preset::snapshot:
      spec.base.n_sus = 9;
      spec.base.n_channels = kSnapshotThetas.size();
      spec.base.theta_list = kSnapshotThetas;
      spec.grid = {{9, kSnapshotThetas.size(), base.phys.alpha, 0.0}};
      spec.seeds = {base.seed};
      break;
  }
  if (base.experiment.optimal_up_to) spec.optimal_up_to = *base.experiment.optimal_up_to;
  if (base.experiment.grid) override_grid(spec, *base.experiment.grid);
  return spec;
}

void override_grid(ExperimentSpec& spec, const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::invalid_config, "grid override is empty", "grid");
  const auto as_count = [](double v) {
    if (!(v >= 1.0) || v != std::floor(v))
      throw Error(ErrorKind::invalid_config, "grid values must be positive integers", "grid");
    return static_cast<std::size_t>(v);
  };
  const auto& b = spec.base;
  std::vector<GridPoint> grid;
  switch (spec.preset) {
    case Preset::sweep_n:
    case Preset::sizes:
      for (double v : values) grid.push_back({as_count(v), b.n_channels, b.phys.alpha, 0.0});
      break;
    case Preset::sweep_alpha:
      for (double v : values) grid.push_back({b.n_sus, b.n_channels, v, 0.0});
      break;
    case Preset::sweep_k:
      for (double v : values) grid.push_back({b.n_sus, as_count(v), b.phys.alpha, 0.0});
      break;
    case Preset::mobility: {
      std::set<std::size_t> sizes;
      for (const auto& g : spec.grid) sizes.insert(g.n_sus);
      for (std::size_t n : sizes)
        for (double v : values) grid.push_back({n, b.n_channels, b.phys.alpha, v});
      break;
    }
    default:
      throw Error(ErrorKind::invalid_config,
                  "preset " + to_string(spec.preset) + " has no grid to override", "grid");
  }
  spec.grid = std::move(grid);
}

SimulationOutcome simulate(const SimConfig& config, const Scenario& scenario,
                           std::size_t optimal_up_to) {
  const auto start = std::chrono::steady_clock::now();
  SimulationOutcome out;
  Evaluator evaluator(scenario, config.valuation);
  try {
    out.trace = form(evaluator, Partition::singletons(scenario.n_sus()), scenario.seed(),
                     config.formation);
  } catch (const NonConvergenceError& e) {
    out.trace = e.trace();
  }
  const auto& final_partition = out.trace.final_partition;
  out.noncoop_payoffs = noncoop_utilities(scenario);
  out.coop_payoffs = evaluator.payoffs(final_partition);

  auto& row = out.row;
  row.seed = scenario.seed();
  row.n = scenario.n_sus();
  row.k = scenario.n_channels();
  row.alpha = scenario.phys().alpha;
  row.mean_noncoop_payoff = mean(out.noncoop_payoffs);
  row.mean_coop_payoff = mean(out.coop_payoffs);
  describe_partition(scenario, final_partition, row);
  row.switch_count = out.trace.switches.size();
  row.converged = out.trace.converged;
  row.nash_stable = audit_nash_stability(evaluator, final_partition).stable;
  if (optimal_up_to > 0 && scenario.n_sus() <= optimal_up_to)
    row.optimal_welfare = optimal_partition(evaluator).welfare;
  row.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

namespace {

struct TaskOutput {
  ResultRow row;
  std::vector<json> records;
};

SimConfig config_at(const ExperimentSpec& spec, const GridPoint& g) {
  SimConfig c = spec.base;
  c.n_sus = g.n_sus;
  c.n_channels = g.n_channels;
  c.phys.alpha = g.alpha;
  c.dynamics.speed_kmh = g.speed_kmh;
  if (c.theta_list && c.theta_list->size() != c.n_channels) c.theta_list.reset();
  return c;
}

json switch_json(const SwitchRecord& r) {
  return {{"su", r.su}, {"from", coalition_json(r.from)}, {"to", coalition_json(r.to)},
          {"pass", r.pass}, {"gain", std::stod(format_number(r.gain))}};
}

TaskOutput run_static(const ExperimentSpec& spec, const GridPoint& g, std::uint64_t seed) {
  const SimConfig c = config_at(spec, g);
  const Scenario sc = make_scenario(c, seed);
  auto outcome = simulate(c, sc, spec.optimal_up_to);
  TaskOutput t{outcome.row, {}};
  if (spec.preset == Preset::simulate) {
    for (const auto& r : outcome.trace.switches) {
      json rec = switch_json(r);
      rec["seed"] = seed;
      t.records.push_back(std::move(rec));
    }
  }
  if (spec.preset == Preset::snapshot) {
    const auto& p = outcome.trace.final_partition;
    json plans = json::array();
    for (const auto& c2 : p.coalitions()) {
      const auto plan = build_plan(sc, c2);
      json orders = json::array();
      for (const auto& o : plan.orderings) orders.push_back(o);
      plans.push_back({{"members", plan.members},
                       {"shared_channels", plan.shared_channels},
                       {"orderings", orders}});
    }
    json payoffs = json::array();
    json base = json::array();
    for (SuId i = 0; i < sc.n_sus(); ++i) {
      payoffs.push_back(std::stod(format_number(outcome.coop_payoffs[i])));
      base.push_back(std::stod(format_number(outcome.noncoop_payoffs[i])));
    }
    json switches = json::array();
    for (const auto& r : outcome.trace.switches) switches.push_back(switch_json(r));
    t.records.push_back({{"seed", seed},
                         {"partition", p.fingerprint()},
                         {"plans", plans},
                         {"coop_payoffs", payoffs},
                         {"noncoop_payoffs", base},
                         {"switches", switches},
                         {"scenario", scenario_to_json(sc)}});
  }
  return t;
}

TaskOutput run_dynamic(const ExperimentSpec& spec, const GridPoint& g, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const SimConfig c = config_at(spec, g);
  const Scenario sc = make_scenario(c, seed);
  DynamicsParams dp = c.dynamics;
  dp.formation = c.formation;
  dp.valuation = c.valuation;
  const auto result = run_dynamics(sc, dp, seed);

  TaskOutput t;
  auto& row = t.row;
  row.seed = seed;
  row.n = sc.n_sus();
  row.k = sc.n_channels();
  row.alpha = sc.phys().alpha;
  row.speed_kmh = dp.speed_kmh;
  row.mean_noncoop_payoff = mean(noncoop_utilities(sc));
  row.mean_coop_payoff = result.epochs.back().mean_payoff;
  describe_partition(result.final_scenario, result.partitions.back(), row);
  row.switch_count = result.metrics.adaptation_switches;
  row.converged = std::all_of(result.epochs.begin(), result.epochs.end(),
                              [](const EpochRecord& e) { return e.converged; });
  row.nash_stable = audit_nash_stability(result.final_scenario, result.partitions.back()).stable;
  row.switch_frequency = result.metrics.switch_frequency_per_minute();
  row.mean_lifespan_s = lifespan_stats(result.metrics);
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  for (const auto& e : result.epochs) {
    json births = json::array();
    json deaths = json::array();
    for (const auto& b : e.births) births.push_back(b);
    for (const auto& d : e.deaths) deaths.push_back(d);
    t.records.push_back({{"seed", seed},
                         {"n", row.n},
                         {"speed_kmh", row.speed_kmh},
                         {"epoch", e.index},
                         {"time_s", e.time_s},
                         {"partition", e.fingerprint},
                         {"coalitions", std::count(e.fingerprint.begin(), e.fingerprint.end(), '{')},
                         {"switches", e.switches},
                         {"births", births},
                         {"deaths", deaths},
                         {"traffic_redrawn", e.traffic_redrawn},
                         {"converged", e.converged},
                         {"mean_payoff", std::stod(format_number(e.mean_payoff))}});
  }
  return t;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.preset = spec.preset;

  if (spec.preset == Preset::oracle) {
    for (const auto& s : oracle::run_all_suites(spec.seeds.front()))
      result.records.push_back({{"suite", s.name},
                                {"cases", s.cases},
                                {"failures", s.failures},
                                {"max_error", std::stod(format_number(s.max_error))},
                                {"tolerance", s.tolerance},
                                {"passed", s.passed()},
                                {"note", s.note}});
    return result;
  }

  const bool dynamic = spec.preset == Preset::traffic || spec.preset == Preset::mobility;
  const std::size_t tasks = spec.grid.size() * spec.seeds.size();
  std::vector<TaskOutput> outputs(tasks);
  parallel_for(tasks, spec.jobs, [&](std::size_t i) {
    const auto& g = spec.grid[i / spec.seeds.size()];
    const auto seed = spec.seeds[i % spec.seeds.size()];
    outputs[i] = dynamic ? run_dynamic(spec, g, seed) : run_static(spec, g, seed);
  });

  for (auto& o : outputs) {
    if (!spec.record_timing) o.row.runtime_ms.reset();
    result.rows.push_back(o.row);
    for (auto& r : o.records) result.records.push_back(std::move(r));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     return std::tie(a.n, a.k, a.alpha, a.speed_kmh, a.seed) <
                            std::tie(b.n, b.k, b.alpha, b.speed_kmh, b.seed);
                   });
  result.series = build_series(spec.preset, result.rows, result.records);
  return result;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns = {
      "seed",          "N",
      "K",             "alpha",
      "speed_kmh",     "mean_noncoop_payoff",
      "mean_coop_payoff", "optimal_welfare",
      "avg_coalition_size", "max_coalition_size",
      "avg_known_channels", "max_known_channels",
      "switch_count",  "converged",
      "nash_stable",   "switch_frequency_per_min",
      "mean_lifespan_s", "runtime_ms"};
  return columns;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

json rounded(double x) { return std::stod(format_number(x)); }

json optional_json(const std::optional<double>& x) {
  return x ? rounded(*x) : json(nullptr);
}

json row_json(const ResultRow& r) {
  return {{"seed", r.seed},
          {"N", r.n},
          {"K", r.k},
          {"alpha", rounded(r.alpha)},
          {"speed_kmh", rounded(r.speed_kmh)},
          {"mean_noncoop_payoff", rounded(r.mean_noncoop_payoff)},
          {"mean_coop_payoff", rounded(r.mean_coop_payoff)},
          {"optimal_welfare", optional_json(r.optimal_welfare)},
          {"avg_coalition_size", rounded(r.avg_coalition_size)},
          {"max_coalition_size", r.max_coalition_size},
          {"avg_known_channels", rounded(r.avg_known_channels)},
          {"max_known_channels", r.max_known_channels},
          {"switch_count", r.switch_count},
          {"converged", r.converged},
          {"nash_stable", r.nash_stable},
          {"switch_frequency_per_min", optional_json(r.switch_frequency)},
          {"mean_lifespan_s", optional_json(r.mean_lifespan_s)},
          {"runtime_ms", optional_json(r.runtime_ms)}};
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<std::string> emit(const ExperimentResult& result, const ExperimentSpec& spec) {
  spec.validate();
  namespace fs = std::filesystem;
  const fs::path dir(spec.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create '" + dir.string() + "': " + ec.message());

  const std::string stem = to_string(result.preset);
  std::vector<std::string> written;

  // Main table. The oracle preset tabulates suites instead of runs.
  std::vector<std::string> columns;
  std::vector<json> table;
  if (result.preset == Preset::oracle) {
    columns = {"suite", "cases", "failures", "max_error", "tolerance", "passed", "note"};
    table = result.records;
  } else {
    columns = result_columns();
    for (const auto& r : result.rows) table.push_back(row_json(r));
  }
  const fs::path main = dir / (stem + (spec.format == Format::csv ? ".csv" : ".json"));
  if (spec.format == Format::csv) {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : table) {
      for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << csv_cell(row.at(columns[c]));
      out << '\n';
    }
    write_file(main, out.str());
  } else {
    json arr = json::array();
    for (const auto& row : table) {
      json ordered = json::object();
      for (const auto& c : columns) ordered[c] = row.at(c);
      arr.push_back(ordered);
    }
    write_file(main, arr.dump(2) + "\n");
  }
  written.push_back(main.string());

  for (const auto& s : result.series) {
    std::ostringstream out;
    out << "# " << s.x_label << " " << s.name << " stderr\n";
    for (const auto& p : s.points)
      out << format_number(p.x) << ' ' << format_number(p.mean) << ' '
          << format_number(p.stderr_) << '\n';
    const fs::path path = dir / (stem + "_" + s.name + ".dat");
    write_file(path, out.str());
    written.push_back(path.string());
  }

  if (!result.records.empty() && result.preset != Preset::oracle) {
    std::ostringstream out;
    for (const auto& r : result.records) out << r.dump() << '\n';
    const fs::path path = dir / (stem + "_records.jsonl");
    write_file(path, out.str());
    written.push_back(path.string());
  }
  return written;
}

}  // namespace crn
