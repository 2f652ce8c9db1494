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

#include "crn/valuation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include "crn/error.hpp"

namespace crn {

namespace {

// Hash of a slot assignment prefix (-1 marks members not yet placed).
struct PrefixHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int x : v) {
      h ^= static_cast<std::uint64_t>(x + 1);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// State after solving the rank groups of an assignment prefix.
struct PrefixState {
  std::vector<double> received;  // per slot: received power from the prefix
  std::vector<double> capacity;  // per member placed so far
  std::vector<double> power;     // [member * slots + slot]
};

}  // namespace

CoalitionModel build_model(const Scenario& scenario, const Coalition& coalition,
                           std::size_t enumeration_cap) {
  CoalitionModel model;
  model.plan = build_plan(scenario, coalition);
  model.outcomes =
      enumerate_outcomes(model.plan, scenario.thetas(), enumeration_cap);
  const double alpha = scenario.phys().alpha;
  for (const auto& order : model.plan.orderings)
    model.tau.push_back(sensing_time(order, scenario.thetas(), alpha));
  const auto marginals =
      transmit_marginals(model.outcomes, scenario.n_channels());
  model.emission.assign(scenario.n_channels(), 0.0);
  const double p = scenario.phys().p_max_mw;
  for (std::size_t m = 0; m < coalition.size(); ++m)
    for (ChannelId k = 0; k < scenario.n_channels(); ++k)
      model.emission[k] +=
          scenario.gains().gain(coalition[m], k) * p * marginals[m][k];
  return model;
}

CoalitionValuation value_coalition(const Scenario& scenario,
                                   const CoalitionModel& model,
                                   std::span<const double> ext_interference,
                                   const SolverParams& solver) {
  const auto& plan = model.plan;
  const auto& shared = plan.shared_channels;
  const std::size_t m_count = plan.size();
  const std::size_t s_count = shared.size();
  const auto& phys = scenario.phys();
  const auto& gains = scenario.gains();

  std::vector<std::size_t> slot_of(scenario.n_channels(), 0);
  for (std::size_t s = 0; s < s_count; ++s) slot_of[shared[s]] = s;

  CoalitionValuation out;
  out.capacity.assign(m_count, 0.0);
  out.expected_power.assign(m_count,
                            std::vector<double>(scenario.n_channels(), 0.0));

  std::unordered_map<std::vector<int>, PrefixState, PrefixHash> memo;
  const PrefixState empty{std::vector<double>(s_count, 0.0),
                          std::vector<double>(m_count, 0.0),
                          std::vector<double>(m_count * s_count, 0.0)};

  for (const auto& tuple : model.outcomes.tuples) {
    std::vector<int> key(m_count, -1);
    const PrefixState* state = &empty;
    for (const auto& group : tuple.rank_groups) {
      for (std::size_t m : group)
        key[m] = static_cast<int>(slot_of[tuple.assignment[m]]);
      auto it = memo.find(key);
      if (it == memo.end()) {
        std::vector<std::size_t> slots;
        for (std::size_t m : group) slots.push_back(slot_of[tuple.assignment[m]]);
        std::sort(slots.begin(), slots.end());
        slots.erase(std::unique(slots.begin(), slots.end()), slots.end());

        RateContext ctx(group.size(), slots.size(), phys.noise_mw);
        for (std::size_t g = 0; g < group.size(); ++g)
          for (std::size_t c = 0; c < slots.size(); ++c) {
            const ChannelId k = shared[slots[c]];
            ctx.gains[g * slots.size() + c] = gains.gain(plan.members[group[g]], k);
            ctx.fixed_interference[g * slots.size() + c] =
                ext_interference[k] + state->received[slots[c]];
          }
        const auto alloc = allocate(ctx, phys.p_max_mw, solver);

        PrefixState next = *state;
        for (std::size_t g = 0; g < group.size(); ++g) {
          next.capacity[group[g]] = member_capacity(alloc, ctx, g);
          for (std::size_t c = 0; c < slots.size(); ++c) {
            const double p = alloc.at(g, c);
            next.received[slots[c]] += ctx.gains[g * slots.size() + c] * p;
            next.power[group[g] * s_count + slots[c]] = p;
          }
        }
        it = memo.emplace(key, std::move(next)).first;
      }
      state = &it->second;
    }
    for (std::size_t m = 0; m < m_count; ++m) {
      out.capacity[m] += tuple.prob * state->capacity[m];
      for (std::size_t s = 0; s < s_count; ++s)
        out.expected_power[m][shared[s]] +=
            tuple.prob * state->power[m * s_count + s];
    }
  }

  out.payoffs.resize(m_count);
  for (std::size_t m = 0; m < m_count; ++m)
    out.payoffs[m] = out.capacity[m] * (1.0 - model.tau[m]);
  return out;
}

std::vector<InterferenceEstimate> external_interference(
    const Scenario& scenario, const Partition& partition,
    std::span<const CoalitionPlan> plans, std::size_t enumeration_cap) {
  if (plans.size() != partition.size())
    throw Error(ErrorKind::invalid_input, "one plan per coalition required");
  const std::size_t k_total = scenario.n_channels();
  const double p = scenario.phys().p_max_mw;
  // emitted[j][k]: received power SU j adds on channel k, full-power model.
  std::vector<std::vector<double>> emitted(scenario.n_sus(),
                                           std::vector<double>(k_total, 0.0));
  for (std::size_t c = 0; c < partition.size(); ++c) {
    const auto dist = enumerate_outcomes(plans[c], scenario.thetas(),
                                         enumeration_cap);
    const auto marginals = transmit_marginals(dist, k_total);
    for (std::size_t m = 0; m < plans[c].size(); ++m) {
      const SuId j = plans[c].members[m];
      for (ChannelId k = 0; k < k_total; ++k)
        emitted[j][k] = scenario.gains().gain(j, k) * p * marginals[m][k];
    }
  }
  std::vector<InterferenceEstimate> out(partition.size(),
                                        InterferenceEstimate(k_total, 0.0));
  for (std::size_t c = 0; c < partition.size(); ++c)
    for (SuId j = 0; j < scenario.n_sus(); ++j) {
      if (partition.coalition_of(j) == c) continue;
      for (ChannelId k = 0; k < k_total; ++k) out[c][k] += emitted[j][k];
    }
  return out;
}

PartitionContext make_context(const Scenario& scenario,
                              const Partition& partition,
                              std::size_t enumeration_cap) {
  PartitionContext ctx;
  ctx.partition = partition;
  for (const auto& c : partition.coalitions())
    ctx.plans.push_back(build_plan(scenario, c));
  ctx.ext_interference =
      external_interference(scenario, partition, ctx.plans, enumeration_cap);
  return ctx;
}

PayoffVector coalition_value(const Scenario& scenario,
                             const PartitionContext& ctx,
                             const Coalition& coalition,
                             const ValuationParams& params) {
  const auto& cs = ctx.partition.coalitions();
  const auto it = std::find(cs.begin(), cs.end(), coalition);
  if (it == cs.end())
    throw Error(ErrorKind::invalid_input, "coalition is not in the partition");
  const auto idx = static_cast<std::size_t>(it - cs.begin());
  CoalitionModel model;
  model.plan = ctx.plans[idx];
  model.outcomes = enumerate_outcomes(model.plan, scenario.thetas(),
                                      params.enumeration_cap);
  for (const auto& order : model.plan.orderings)
    model.tau.push_back(
        sensing_time(order, scenario.thetas(), scenario.phys().alpha));
  auto v = value_coalition(scenario, model, ctx.ext_interference[idx],
                           params.solver);
  return {coalition, std::move(v.payoffs)};
}

std::vector<double> evaluate_partition(const Scenario& scenario,
                                       const Partition& partition,
                                       const ValuationParams& params) {
  if (partition.n_sus() != scenario.n_sus())
    throw Error(ErrorKind::invalid_input, "partition size mismatch");
  const std::size_t k_total = scenario.n_channels();
  std::vector<CoalitionModel> models;
  for (const auto& c : partition.coalitions())
    models.push_back(build_model(scenario, c, params.enumeration_cap));

  std::vector<InterferenceEstimate> ext(partition.size(),
                                        InterferenceEstimate(k_total, 0.0));
  for (std::size_t c = 0; c < partition.size(); ++c)
    for (std::size_t o = 0; o < partition.size(); ++o) {
      if (o == c) continue;
      for (ChannelId k = 0; k < k_total; ++k) ext[c][k] += models[o].emission[k];
    }

  std::vector<CoalitionValuation> values(partition.size());
  const auto value_all = [&] {
    for (std::size_t c = 0; c < partition.size(); ++c)
      values[c] = value_coalition(scenario, models[c], ext[c], params.solver);
  };
  value_all();

  for (std::size_t round = 0; round < params.fixed_point_rounds; ++round) {
    std::vector<std::vector<double>> emitted(partition.size(),
                                             std::vector<double>(k_total, 0.0));
    for (std::size_t c = 0; c < partition.size(); ++c) {
      const auto& members = partition[c];
      for (std::size_t m = 0; m < members.size(); ++m)
        for (ChannelId k = 0; k < k_total; ++k)
          emitted[c][k] += scenario.gains().gain(members[m], k) *
                           values[c].expected_power[m][k];
    }
    double change = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < partition.size(); ++c)
      for (ChannelId k = 0; k < k_total; ++k) {
        double fresh = 0.0;
        for (std::size_t o = 0; o < partition.size(); ++o)
          if (o != c) fresh += emitted[o][k];
        const double mixed = (1.0 - params.fixed_point_damping) * ext[c][k] +
                             params.fixed_point_damping * fresh;
        change = std::max(change, std::abs(mixed - ext[c][k]));
        scale = std::max(scale, std::abs(mixed));
        ext[c][k] = mixed;
      }
    value_all();
    if (change <= 1e-12 * std::max(scale, 1e-300)) break;
  }

  std::vector<double> out(scenario.n_sus(), 0.0);
  for (std::size_t c = 0; c < partition.size(); ++c)
    for (std::size_t m = 0; m < partition[c].size(); ++m)
      out[partition[c][m]] = values[c].payoffs[m];
  return out;
}

double welfare(std::span<const double> payoffs) {
  return std::accumulate(payoffs.begin(), payoffs.end(), 0.0);
}

std::size_t Evaluator::ValueKeyHash::operator()(const ValueKey& k) const noexcept {
  std::uint64_t h = k.mask * 0x9e3779b97f4a7c15ULL;
  for (double x : k.interference) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Evaluator::Evaluator(const Scenario& scenario, ValuationParams params)
    : scenario_(scenario), params_(params) {}

const CoalitionModel& Evaluator::model(const Coalition& coalition) {
  const CoalitionMask mask = mask_of(coalition);
  auto it = models_.find(mask);
  if (it == models_.end()) {
    std::unique_ptr<CoalitionModel> built;
    try {
      built = std::make_unique<CoalitionModel>(
          build_model(scenario_, coalition, params_.enumeration_cap));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::enumeration_limit) throw;
    }
    it = models_.emplace(mask, std::move(built)).first;
  }
  if (!it->second)
    throw Error(ErrorKind::enumeration_limit,
                "coalition outcome enumeration exceeds the cap");
  return *it->second;
}

InterferenceEstimate Evaluator::interference_on(const Partition& partition,
                                                std::size_t coalition_index) {
  InterferenceEstimate ext(scenario_.n_channels(), 0.0);
  for (std::size_t o = 0; o < partition.size(); ++o) {
    if (o == coalition_index) continue;
    const auto& emission = model(partition[o]).emission;
    for (ChannelId k = 0; k < ext.size(); ++k) ext[k] += emission[k];
  }
  return ext;
}

const std::vector<double>& Evaluator::value(const Partition& partition,
                                            std::size_t coalition_index) {
  const auto& coalition = partition[coalition_index];
  const auto& m = model(coalition);
  auto ext = interference_on(partition, coalition_index);
  ValueKey key{mask_of(coalition), {}};
  key.interference.reserve(m.plan.shared_channels.size());
  for (ChannelId k : m.plan.shared_channels) key.interference.push_back(ext[k]);
  auto it = values_.find(key);
  if (it != values_.end()) {
    ++hits_;
    return it->second;
  }
  ++evaluations_;
  auto v = value_coalition(scenario_, m, ext, params_.solver);
  return values_.emplace(std::move(key), std::move(v.payoffs)).first->second;
}

double Evaluator::payoff(const Partition& partition, SuId su) {
  const std::size_t c = partition.coalition_of(su);
  const auto& members = partition[c];
  const auto pos = static_cast<std::size_t>(
      std::lower_bound(members.begin(), members.end(), su) - members.begin());
  return value(partition, c)[pos];
}

std::vector<double> Evaluator::payoffs(const Partition& partition) {
  std::vector<double> out(scenario_.n_sus(), 0.0);
  for (std::size_t c = 0; c < partition.size(); ++c) {
    const auto& v = value(partition, c);
    for (std::size_t m = 0; m < partition[c].size(); ++m)
      out[partition[c][m]] = v[m];
  }
  return out;
}

}  // namespace crn
