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

#ifndef CRN_VALUATION_HPP
#define CRN_VALUATION_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "crn/noncoop.hpp"
#include "crn/outcomes.hpp"
#include "crn/partition.hpp"
#include "crn/power.hpp"

namespace crn {

struct ValuationParams {
  SolverParams solver;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  /// Extra interference re-estimation rounds in evaluate_partition, using the
  /// expected allocated powers instead of the full-power estimate. 0 keeps the
  /// one-shot estimate.
  std::size_t fixed_point_rounds = 0;
  double fixed_point_damping = 0.5;
};

/// Utilities of the members of one coalition, aligned with `coalition`.
struct PayoffVector {
  Coalition coalition;
  std::vector<double> payoffs;
};

/// Everything about a coalition that does not depend on the rest of the
/// partition.
struct CoalitionModel {
  CoalitionPlan plan;
  OutcomeDistribution outcomes;
  /// Sensing time of each member over its cooperative order.
  std::vector<double> tau;
  /// Expected received power the coalition puts on each channel at the BS
  /// when a transmitting member is taken at full power: sum_j g_jk P Pr_j(k).
  std::vector<double> emission;
};

CoalitionModel build_model(const Scenario& scenario, const Coalition& coalition,
                           std::size_t enumeration_cap = kDefaultEnumerationCap);

/// Per-coalition valuation inputs for a whole partition.
struct PartitionContext {
  Partition partition;
  std::vector<CoalitionPlan> plans;
  /// ext_interference[c][k]: average interference from outside coalition c on
  /// channel k, mW.
  std::vector<InterferenceEstimate> ext_interference;
};

/// One-shot outsider interference: for coalition S and channel k,
/// sum over j outside S of g_jk * P * Pr_j(transmit on k).
std::vector<InterferenceEstimate> external_interference(
    const Scenario& scenario, const Partition& partition,
    std::span<const CoalitionPlan> plans,
    std::size_t enumeration_cap = kDefaultEnumerationCap);

PartitionContext make_context(const Scenario& scenario,
                              const Partition& partition,
                              std::size_t enumeration_cap = kDefaultEnumerationCap);

/// Members' payoffs and expected per-channel transmit powers for a coalition
/// facing the given outsider interference (indexed by channel id).
struct CoalitionValuation {
  std::vector<double> payoffs;
  std::vector<double> capacity;   ///< expected capacity per member
  std::vector<std::vector<double>> expected_power;  ///< [member][channel id]
};

/// Expected capacity over the outcome distribution, rank groups solved in
/// ascending rank with earlier groups' powers held as fixed interference,
/// times (1 - tau) per member.
CoalitionValuation value_coalition(const Scenario& scenario,
                                   const CoalitionModel& model,
                                   std::span<const double> ext_interference,
                                   const SolverParams& solver = {});

PayoffVector coalition_value(const Scenario& scenario,
                             const PartitionContext& ctx,
                             const Coalition& coalition,
                             const ValuationParams& params = {});

/// Payoff of every SU, indexed by SU id.
std::vector<double> evaluate_partition(const Scenario& scenario,
                                       const Partition& partition,
                                       const ValuationParams& params = {});

double welfare(std::span<const double> payoffs);

/// Caching evaluator for the formation loop. Coalition models are cached by
/// member set and coalition values by (member set, outsider interference), so
/// re-checking an unchanged neighbourhood costs a hash lookup.
///
/// Holds a reference to the scenario, which must outlive it. Not thread-safe.
class Evaluator {
 public:
  explicit Evaluator(const Scenario& scenario, ValuationParams params = {});

  const Scenario& scenario() const noexcept { return scenario_; }
  const ValuationParams& params() const noexcept { return params_; }

  /// Throws enumeration_limit when the coalition's outcomes exceed the cap.
  const CoalitionModel& model(const Coalition& coalition);

  InterferenceEstimate interference_on(const Partition& partition,
                                       std::size_t coalition_index);

  /// Payoffs of the members of partition[coalition_index].
  const std::vector<double>& value(const Partition& partition,
                                   std::size_t coalition_index);

  /// x_su under `partition`.
  double payoff(const Partition& partition, SuId su);

  std::vector<double> payoffs(const Partition& partition);

  std::size_t value_evaluations() const noexcept { return evaluations_; }
  std::size_t value_cache_hits() const noexcept { return hits_; }

 private:
  struct ValueKey {
    CoalitionMask mask;
    std::vector<double> interference;
    bool operator==(const ValueKey&) const = default;
  };
  struct ValueKeyHash {
    std::size_t operator()(const ValueKey& k) const noexcept;
  };

  const Scenario& scenario_;
  ValuationParams params_;
  std::unordered_map<CoalitionMask, std::unique_ptr<CoalitionModel>> models_;
  std::unordered_map<ValueKey, std::vector<double>, ValueKeyHash> values_;
  std::size_t evaluations_ = 0;
  std::size_t hits_ = 0;
};

}  // namespace crn

#endif  // CRN_VALUATION_HPP
