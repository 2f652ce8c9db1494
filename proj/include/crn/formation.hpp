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

#ifndef CRN_FORMATION_HPP
#define CRN_FORMATION_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crn/error.hpp"
#include "crn/partition.hpp"
#include "crn/rng.hpp"
#include "crn/valuation.hpp"

namespace crn {

/// Coalitions of size > 1 each SU has left, by member set.
class HistorySet {
 public:
  explicit HistorySet(std::size_t n_sus = 0) : visited_(n_sus) {}

  void record(SuId su, const Coalition& left);
  bool contains(SuId su, const Coalition& coalition) const;
  void clear();
  bool empty() const;

 private:
  std::vector<std::set<CoalitionMask>> visited_;
};

/// Partitions already reached during one formation run.
class VisitedPartitions {
 public:
  /// Returns false when `p` was already recorded.
  bool insert(const Partition& p);
  bool contains(const Partition& p) const;
  std::size_t size() const noexcept { return seen_.size(); }
  void clear() noexcept { seen_.clear(); }

 private:
  static std::vector<CoalitionMask> key(const Partition& p);
  std::set<std::vector<CoalitionMask>> seen_;
};

struct SwitchRecord {
  SuId su = 0;
  Coalition from;  ///< coalition the SU left, including the SU
  Coalition to;    ///< coalition it joined, before joining (empty = solo)
  std::size_t pass = 0;
  double gain = 0.0;  ///< payoff improvement of the moving SU
};

struct FormationTrace {
  Partition initial;
  Partition final_partition;
  std::vector<SwitchRecord> switches;
  std::size_t passes = 0;
  /// Quiet passes after which the histories were cleared and scanning resumed.
  std::size_t history_resets = 0;
  /// Profitable moves skipped because they led back to a visited partition.
  std::size_t revisit_vetoes = 0;
  /// Quiet passes whose only improving moves were vetoed; the visited set
  /// was then cleared.
  std::size_t visited_resets = 0;
  /// Attempts abandoned as trapped, and the switches they made. `switches`
  /// holds only the final attempt, so replay() starts from `initial`.
  std::size_t restarts = 0;
  std::size_t abandoned_switches = 0;
  bool converged = false;
};

struct FormationParams {
  /// 0 selects 10 * N^2.
  std::size_t max_passes = 0;
  /// When a pass makes no switch but some history is non-empty, clear all
  /// histories and keep going, so the final pass runs with empty histories.
  bool reset_history_on_quiescence = true;
  /// Skip moves that recreate a partition reached earlier in the run. Without
  /// this, three SUs can chase each other around a cycle that per-SU
  /// histories never block.
  bool forbid_revisits = true;
  /// When a pass is quiet only because of that veto, forget the visited set
  /// and continue instead of stopping at an unstable partition.
  bool restart_when_blocked = true;
  /// Visited-set resets allowed per attempt before the run restarts from the
  /// initial partition; 0 selects N.
  std::size_t resets_per_attempt = 0;
};

/// Raised when formation exceeds its pass budget; carries the partial trace.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, FormationTrace trace)
      : Error(ErrorKind::non_convergence, message), trace_(std::move(trace)) {}
  const FormationTrace& trace() const noexcept { return trace_; }

 private:
  FormationTrace trace_;
};

/// phi_i(S, Pi'): the SU's payoff in `candidate` (a coalition of
/// `candidate_partition` containing `su`) unless an incumbent would lose
/// compared with `current_partition`, or the coalition is in the SU's history,
/// in which case 0. Singletons are never vetoed. Coalitions whose outcome
/// enumeration exceeds the cap score 0.
double preference_value(Evaluator& evaluator, SuId su,
                        const Partition& candidate_partition,
                        const Partition& current_partition,
                        const HistorySet& history);

struct SwitchResult {
  Partition partition;
  SwitchRecord record;
};

/// Scans the other coalitions in index order, then going solo, and executes
/// the first move the SU strictly prefers. Updates `history` on a move. With
/// `visited`, moves into a recorded partition are skipped and counted in
/// `vetoed`. With `shuffle`, the destinations (solo included) are scanned in
/// an order drawn from it instead.
std::optional<SwitchResult> try_switch(Evaluator& evaluator,
                                       const Partition& partition,
                                       HistorySet& history, SuId su,
                                       std::size_t pass = 0,
                                       const VisitedPartitions* visited = nullptr,
                                       std::size_t* vetoed = nullptr,
                                       Rng* shuffle = nullptr);

/// Passes over the SUs in a seeded random order (fresh each pass) until a pass
/// executes no switch.
FormationTrace form(Evaluator& evaluator, const Partition& initial,
                    std::uint64_t seed, const FormationParams& params = {});
FormationTrace form(const Scenario& scenario, const Partition& initial,
                    std::uint64_t seed, const FormationParams& params = {});

/// Re-applies the switch records to the initial partition.
Partition replay(const FormationTrace& trace);

struct Deviation {
  SuId su = 0;
  Coalition destination;  ///< empty = going solo
  double gain = 0.0;
};

struct StabilityVerdict {
  bool stable = true;
  std::vector<Deviation> violations;
};

/// Checks every SU against every destination with empty histories.
StabilityVerdict audit_nash_stability(Evaluator& evaluator,
                                      const Partition& partition);
StabilityVerdict audit_nash_stability(const Scenario& scenario,
                                      const Partition& partition);

inline constexpr std::size_t kOptimalSearchMaxSus = 8;

struct OptimalResult {
  Partition partition;
  double welfare = 0.0;
  std::size_t partitions_evaluated = 0;
  std::size_t partitions_rejected = 0;  ///< over the enumeration cap
};

/// Exhaustive search over all set partitions for maximum total utility.
OptimalResult optimal_partition(Evaluator& evaluator);
OptimalResult optimal_partition(const Scenario& scenario);

}  // namespace crn

#endif  // CRN_FORMATION_HPP
