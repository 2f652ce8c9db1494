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

#include "crn/dynamics.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "crn/error.hpp"
#include "crn/rng.hpp"

namespace crn {

void DynamicsParams::validate() const {
  if (!(eta_seconds > 0.0))
    throw Error(ErrorKind::invalid_config, "eta must be positive", "eta_seconds");
  if (!(duration_seconds >= eta_seconds))
    throw Error(ErrorKind::invalid_config, "duration must be at least eta",
                "duration_seconds");
  if (!(speed_kmh >= 0.0))
    throw Error(ErrorKind::invalid_config, "speed must be non-negative", "speed_kmh");
  if (!(traffic_redraw_seconds >= 0.0))
    throw Error(ErrorKind::invalid_config,
                "traffic redraw period must be non-negative",
                "traffic_redraw_seconds");
}

double EpochMetrics::switch_frequency_per_minute() const {
  return static_cast<double>(adaptation_switches) / (duration_seconds / 60.0);
}

double reflect_into(double x, double half) {
  if (!(half > 0.0)) return 0.0;
  const double period = 4.0 * half;
  double t = std::fmod(x + half, period);
  if (t < 0.0) t += period;
  return t <= 2.0 * half ? t - half : 3.0 * half - t;
}

namespace {

bool crosses_traffic_boundary(double prev_s, double now_s, double period) {
  if (period <= 0.0) return false;
  return std::floor(now_s / period + 1e-9) > std::floor(prev_s / period + 1e-9);
}

std::vector<Coalition> multi_member(const Partition& p) {
  std::vector<Coalition> out;
  for (const auto& c : p.coalitions())
    if (c.size() > 1) out.push_back(c);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

DynamicsResult run_dynamics(const Scenario& scenario, const DynamicsParams& params,
                            std::uint64_t seed) {
  params.validate();
  const std::size_t n = scenario.n_sus();
  const double half = scenario.phys().area_m / 2.0;
  const double step_m = params.speed_kmh / 3.6 * params.eta_seconds;

  std::vector<EpochRecord> epochs;
  std::vector<Partition> partitions;
  EpochMetrics metrics;
  metrics.duration_seconds = params.duration_seconds;

  Scenario world = scenario;
  Partition current = Partition::singletons(n);
  std::map<Coalition, double> alive;  // member set -> birth time

  const auto run_epoch = [&](std::size_t index, double time_s, bool redrawn) {
    Evaluator evaluator(world, params.valuation);
    FormationTrace trace;
    try {
      trace = form(evaluator, current, mix64(seed + index), params.formation);
    } catch (const NonConvergenceError& e) {
      // Keep going from wherever the guard stopped; the epoch is flagged.
      trace = e.trace();
    }

    EpochRecord record;
    record.index = index;
    record.time_s = time_s;
    record.switches = trace.switches.size();
    record.traffic_redrawn = redrawn;
    record.converged = trace.converged;

    std::map<Coalition, double> next;
    for (auto& c : multi_member(trace.final_partition)) {
      const auto it = alive.find(c);
      if (it != alive.end()) {
        next.emplace(c, it->second);
      } else {
        record.births.push_back(c);
        next.emplace(c, time_s);
      }
    }
    for (const auto& [c, born] : alive) {
      if (next.count(c)) continue;
      record.deaths.push_back(c);
      metrics.lifespans.push_back({c, born, time_s, false});
    }
    alive = std::move(next);

    current = trace.final_partition;
    record.fingerprint = current.fingerprint();
    record.mean_payoff = mean_of(evaluator.payoffs(current));
    metrics.switches_per_epoch.push_back(record.switches);
    if (index > 0) metrics.adaptation_switches += record.switches;
    epochs.push_back(std::move(record));
    partitions.push_back(current);
  };

  run_epoch(0, 0.0, false);

  for (std::size_t e = 1;; ++e) {
    const double now = static_cast<double>(e) * params.eta_seconds;
    if (now >= params.duration_seconds - 1e-9) break;
    const double prev = now - params.eta_seconds;

    // Random-walk step with a heading drawn fresh for this epoch.
    auto positions = world.positions();
    Rng heading(seed, Stream::mobility, e);
    for (auto& p : positions) {
      const double angle = heading.uniform(0.0, 2.0 * std::numbers::pi);
      p.x = reflect_into(p.x + step_m * std::cos(angle), half);
      p.y = reflect_into(p.y + step_m * std::sin(angle), half);
    }
    world = world.with_positions(std::move(positions));

    const bool redraw =
        crosses_traffic_boundary(prev, now, params.traffic_redraw_seconds);
    if (redraw) {
      Rng traffic(seed, Stream::traffic, e);
      std::vector<double> thetas(world.n_channels());
      for (auto& t : thetas) t = traffic.uniform();
      world = world.with_thetas(thetas);
    }

    if (!params.freeze_fading) {
      Rng fading(seed, Stream::refading, e);
      std::vector<double> amplitudes(world.gains().amplitudes().size());
      for (auto& a : amplitudes) a = fading.rayleigh();
      world = world.with_amplitudes(std::move(amplitudes));
    }

    run_epoch(e, now, redraw);
  }

  for (const auto& [c, born] : alive)
    metrics.lifespans.push_back({c, born, params.duration_seconds, true});

  return DynamicsResult{std::move(epochs), std::move(partitions), std::move(metrics),
                        std::move(world)};
}

std::optional<double> lifespan_stats(const EpochMetrics& metrics) {
  if (metrics.lifespans.empty()) return std::nullopt;
  double total = 0.0;
  for (const auto& l : metrics.lifespans) total += l.seconds();
  return total / static_cast<double>(metrics.lifespans.size());
}

}  // namespace crn
