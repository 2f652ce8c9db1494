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

#include "crn/formation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "crn/rng.hpp"

namespace crn {

void HistorySet::record(SuId su, const Coalition& left) {
  if (left.size() > 1) visited_.at(su).insert(mask_of(left));
}

bool HistorySet::contains(SuId su, const Coalition& coalition) const {
  return visited_.at(su).count(mask_of(coalition)) > 0;
}

void HistorySet::clear() {
  for (auto& v : visited_) v.clear();
}

bool HistorySet::empty() const {
  return std::all_of(visited_.begin(), visited_.end(),
                     [](const auto& v) { return v.empty(); });
}

std::vector<CoalitionMask> VisitedPartitions::key(const Partition& p) {
  std::vector<CoalitionMask> k;
  k.reserve(p.size());
  for (const auto& c : p.coalitions()) k.push_back(mask_of(c));
  return k;
}

bool VisitedPartitions::insert(const Partition& p) { return seen_.insert(key(p)).second; }

bool VisitedPartitions::contains(const Partition& p) const {
  return seen_.count(key(p)) > 0;
}

double preference_value(Evaluator& evaluator, SuId su,
                        const Partition& candidate_partition,
                        const Partition& current_partition,
                        const HistorySet& history) {
  const std::size_t c = candidate_partition.coalition_of(su);
  const auto& coalition = candidate_partition[c];
  if (coalition.size() == 1) return evaluator.payoff(candidate_partition, su);
  if (history.contains(su, coalition)) return 0.0;

  std::vector<double> values;
  try {
    values = evaluator.value(candidate_partition, c);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::enumeration_limit) return 0.0;
    throw;
  }
  double own = 0.0;
  for (std::size_t m = 0; m < coalition.size(); ++m) {
    const SuId j = coalition[m];
    if (j == su) {
      own = values[m];
      continue;
    }
    if (values[m] < evaluator.payoff(current_partition, j)) return 0.0;
  }
  return own;
}

std::optional<SwitchResult> try_switch(Evaluator& evaluator,
                                       const Partition& partition,
                                       HistorySet& history, SuId su,
                                       std::size_t pass,
                                       const VisitedPartitions* visited,
                                       std::size_t* vetoed, Rng* shuffle) {
  const std::size_t from = partition.coalition_of(su);
  const double current = evaluator.payoff(partition, su);

  const auto execute = [&](Partition next, Coalition to, double value) {
    SwitchRecord record{su, partition[from], std::move(to), pass, value - current};
    history.record(su, partition[from]);
    return SwitchResult{std::move(next), std::move(record)};
  };

  const auto admissible = [&](const Partition& candidate) {
    if (!visited || !visited->contains(candidate)) return true;
    if (vetoed) ++*vetoed;
    return false;
  };

  // Destination slots; partition.size() stands for going solo.
  std::vector<std::size_t> slots;
  for (std::size_t k = 0; k < partition.size(); ++k)
    if (k != from) slots.push_back(k);
  if (partition[from].size() > 1) slots.push_back(partition.size());
  if (shuffle)
    for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[shuffle->below(i)]);

  for (std::size_t k : slots) {
    const bool solo = k == partition.size();
    auto candidate = partition.with_move(su, solo ? std::nullopt : std::optional(k));
    const double value = preference_value(evaluator, su, candidate, partition, history);
    if (value > current && admissible(candidate))
      return execute(std::move(candidate), solo ? Coalition{} : partition[k], value);
  }
  return std::nullopt;
}

FormationTrace form(Evaluator& evaluator, const Partition& initial,
                    std::uint64_t seed, const FormationParams& params) {
  const std::size_t n = evaluator.scenario().n_sus();
  if (initial.n_sus() != n)
    throw Error(ErrorKind::invalid_input, "partition size mismatch");
  const std::size_t max_passes =
      params.max_passes ? params.max_passes : std::max<std::size_t>(10 * n * n, 1);
  const std::size_t resets_per_attempt =
      params.resets_per_attempt ? params.resets_per_attempt : std::max<std::size_t>(n, 1);

  FormationTrace trace;
  trace.initial = initial;
  Partition current = initial;
  HistorySet history(n);
  VisitedPartitions visited;
  visited.insert(current);
  const VisitedPartitions* guard = params.forbid_revisits ? &visited : nullptr;
  std::vector<SuId> order(n);
  std::size_t attempt_resets = 0;

  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    std::iota(order.begin(), order.end(), SuId{0});
    Rng rng(seed, Stream::formation, pass);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const bool shuffled = attempt_resets > 0 || trace.restarts > 0;

    std::size_t moves = 0;
    const std::size_t vetoes_before = trace.revisit_vetoes;
    for (SuId su : order) {
      if (auto result = try_switch(evaluator, current, history, su, pass, guard,
                                   &trace.revisit_vetoes, shuffled ? &rng : nullptr)) {
        current = std::move(result->partition);
        visited.insert(current);
        trace.switches.push_back(std::move(result->record));
        ++moves;
      }
    }
    trace.passes = pass + 1;
    if (moves == 0 && params.reset_history_on_quiescence && !history.empty()) {
      // A move vetoed only by history would still be a profitable deviation;
      // forget the history and look again.
      history.clear();
      ++trace.history_resets;
      continue;
    }
    if (moves == 0 && trace.revisit_vetoes > vetoes_before && params.restart_when_blocked) {
      if (++attempt_resets <= resets_per_attempt) {
        // Every improving move leads back into explored territory. Forget the
        // explored set and walk on; shuffled scans vary the route.
        visited.clear();
        ++trace.visited_resets;
      } else {
        // Stuck in a closed improvement cycle: start over from the initial
        // partition on a different route. Only the last attempt is kept.
        trace.abandoned_switches += trace.switches.size();
        trace.switches.clear();
        ++trace.restarts;
        attempt_resets = 0;
        current = initial;
        history.clear();
        visited.clear();
      }
      visited.insert(current);
      continue;
    }
    if (moves == 0) {
      trace.converged = true;
      trace.final_partition = current;
      return trace;
    }
  }
  trace.final_partition = current;
  throw NonConvergenceError("coalition formation exceeded " +
                                std::to_string(max_passes) + " passes",
                            std::move(trace));
}

FormationTrace form(const Scenario& scenario, const Partition& initial,
                    std::uint64_t seed, const FormationParams& params) {
  Evaluator evaluator(scenario);
  return form(evaluator, initial, seed, params);
}

Partition replay(const FormationTrace& trace) {
  Partition p = trace.initial;
  for (const auto& r : trace.switches) {
    std::optional<std::size_t> dest;
    if (!r.to.empty()) {
      const auto& cs = p.coalitions();
      const auto it = std::find(cs.begin(), cs.end(), r.to);
      if (it == cs.end())
        throw Error(ErrorKind::invalid_input,
                    "trace destination is not in the replayed partition");
      dest = static_cast<std::size_t>(it - cs.begin());
    }
    if (p[p.coalition_of(r.su)] != r.from)
      throw Error(ErrorKind::invalid_input,
                  "trace origin does not match the replayed partition");
    p = p.with_move(r.su, dest);
  }
  return p;
}

StabilityVerdict audit_nash_stability(Evaluator& evaluator,
                                      const Partition& partition) {
  StabilityVerdict verdict;
  const HistorySet fresh(partition.n_sus());
  for (SuId su = 0; su < partition.n_sus(); ++su) {
    const std::size_t from = partition.coalition_of(su);
    const double current = evaluator.payoff(partition, su);
    const auto check = [&](std::optional<std::size_t> dest) {
      const auto candidate = partition.with_move(su, dest);
      const double phi =
          preference_value(evaluator, su, candidate, partition, fresh);
      if (phi > current)
        verdict.violations.push_back(
            {su, dest ? partition[*dest] : Coalition{}, phi - current});
    };
    for (std::size_t k = 0; k < partition.size(); ++k)
      if (k != from) check(k);
    if (partition[from].size() > 1) check(std::nullopt);
  }
  verdict.stable = verdict.violations.empty();
  return verdict;
}

StabilityVerdict audit_nash_stability(const Scenario& scenario,
                                      const Partition& partition) {
  Evaluator evaluator(scenario);
  return audit_nash_stability(evaluator, partition);
}

OptimalResult optimal_partition(Evaluator& evaluator) {
  const std::size_t n = evaluator.scenario().n_sus();
  if (n > kOptimalSearchMaxSus)
    throw Error(ErrorKind::size_limit,
                "exhaustive partition search is limited to " +
                    std::to_string(kOptimalSearchMaxSus) + " SUs",
                "n_sus");
  OptimalResult best;
  best.welfare = -std::numeric_limits<double>::infinity();
  for_each_partition(n, [&](const Partition& p) {
    std::vector<double> payoffs;
    try {
      payoffs = evaluator.payoffs(p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::enumeration_limit) throw;
      ++best.partitions_rejected;
      return;
    }
    ++best.partitions_evaluated;
    const double w = welfare(payoffs);
    if (w > best.welfare) {
      best.welfare = w;
      best.partition = p;
    }
  });
  return best;
}

OptimalResult optimal_partition(const Scenario& scenario) {
  Evaluator evaluator(scenario);
  return optimal_partition(evaluator);
}

}  // namespace crn
