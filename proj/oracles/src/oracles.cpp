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

#include "crn_oracles/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crn/power.hpp"

namespace crn::oracle {

namespace {

// Probability of one availability pattern; bit s of `mask` means channel
// channels[s] is free.
double pattern_probability(const std::vector<std::size_t>& channels,
                           const std::vector<double>& thetas, std::uint64_t mask) {
  double p = 1.0;
  for (std::size_t s = 0; s < channels.size(); ++s)
    p *= (mask >> s & 1U) ? thetas[channels[s]] : 1.0 - thetas[channels[s]];
  return p;
}

std::size_t index_in(const std::vector<std::size_t>& v, std::size_t x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

}  // namespace

double sensing_time(const std::vector<double>& ordered_thetas, double alpha) {
  const std::size_t k = ordered_thetas.size();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    double p = 1.0;
    for (std::size_t j = 0; j < k; ++j)
      p *= (mask >> j & 1U) ? ordered_thetas[j] : 1.0 - ordered_thetas[j];
    double time = 1.0;
    for (std::size_t j = 0; j < k; ++j)
      if (mask >> j & 1U) {
        time = static_cast<double>(j + 1) * alpha;
        break;
      }
    total += p * time;
  }
  return total;
}

std::map<std::vector<std::size_t>, double> outcome_distribution(
    const std::vector<std::vector<std::size_t>>& orderings,
    const std::vector<double>& thetas_by_channel) {
  std::set<std::size_t> pooled;
  for (const auto& o : orderings) pooled.insert(o.begin(), o.end());
  const std::vector<std::size_t> channels(pooled.begin(), pooled.end());

  std::map<std::vector<std::size_t>, double> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << channels.size()); ++mask) {
    const double p = pattern_probability(channels, thetas_by_channel, mask);
    std::vector<std::size_t> choice;
    for (const auto& o : orderings) {
      std::size_t pick = kNone;
      for (std::size_t k : o)
        if (mask >> index_in(channels, k) & 1U) {
          pick = k;
          break;
        }
      choice.push_back(pick);
    }
    out[choice] += p;
  }
  return out;
}

std::vector<std::size_t> reference_order(
    std::vector<std::size_t> channels,
    const std::function<double(std::size_t)>& weight) {
  std::sort(channels.begin(), channels.end(), [&](std::size_t a, std::size_t b) {
    const double wa = weight(a);
    const double wb = weight(b);
    if (wa != wb) return wa > wb;
    return a < b;
  });
  return channels;
}

SortAudit audit_sort(const CoalitionPlan& plan, const SortTrace& trace,
                     const WeightFn& weight) {
  SortAudit audit;
  const auto fail = [&](bool SortAudit::*flag, const std::string& why) {
    audit.*flag = false;
    if (audit.failure.empty()) audit.failure = why;
  };
  const std::size_t members = plan.members.size();
  const std::vector<std::size_t> pooled(plan.shared_channels.begin(),
                                        plan.shared_channels.end());
  const std::size_t k_count = pooled.size();

  for (const auto& o : plan.orderings) {
    std::vector<std::size_t> sorted(o.begin(), o.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted != pooled) fail(&SortAudit::permutations, "ordering is not a permutation");
  }

  // Best channel of `m` among `candidates`: top weight, lowest id on ties.
  const auto best_of = [&](std::size_t m, const std::vector<std::size_t>& candidates) {
    std::size_t best = kNone;
    for (std::size_t k : candidates)
      if (best == kNone || weight(m, k) > weight(m, best) ||
          (weight(m, k) == weight(m, best) && k < best))
        best = k;
    return best;
  };

  // Replay rank by rank, round by round.
  std::vector<std::set<std::size_t>> used(members);
  std::vector<std::vector<std::size_t>> rebuilt(members);
  std::size_t cursor = 0;
  for (std::size_t rank = 0; rank < k_count; ++rank) {
    std::set<std::size_t> taken;
    std::set<std::size_t> waiting;
    for (std::size_t m = 0; m < members; ++m) waiting.insert(m);
    for (std::size_t round = 0; !waiting.empty(); ++round) {
      if (round > k_count * members) {
        fail(&SortAudit::trace_consistent, "round bound exceeded");
        return audit;
      }
      // Open and remaining channels at the start of the round.
      std::map<std::size_t, std::vector<std::size_t>> open;
      std::map<std::size_t, std::vector<std::size_t>> remaining;
      std::map<std::size_t, std::vector<std::size_t>> bidders;
      for (std::size_t m : waiting) {
        for (std::size_t k : pooled) {
          if (used[m].count(k)) continue;
          remaining[m].push_back(k);
          if (!taken.count(k)) open[m].push_back(k);
        }
        if (!open[m].empty()) bidders[best_of(m, open[m])].push_back(m);
      }

      std::set<std::size_t> fixed_now;
      while (cursor < trace.picks.size() && trace.picks[cursor].rank == rank &&
             trace.picks[cursor].round == round) {
        const auto& pick = trace.picks[cursor++];
        const std::size_t m = pick.member;
        if (!waiting.count(m) || fixed_now.count(m)) {
          fail(&SortAudit::trace_consistent, "member picked twice in a round");
          return audit;
        }
        const std::vector<std::size_t> recorded(pick.open_candidates.begin(),
                                                pick.open_candidates.end());
        if (recorded != open[m])
          fail(&SortAudit::trace_consistent, "recorded open set differs from replay");
        if (pick.kind == PickKind::forced) {
          if (!open[m].empty())
            fail(&SortAudit::collisions_forced, "forced pick with free channels");
          if (pick.channel != best_of(m, remaining[m]))
            fail(&SortAudit::trace_consistent, "forced pick is not the best remaining");
        } else {
          if (pick.channel != best_of(m, open[m]))
            fail(&SortAudit::trace_consistent, "pick is not the best open channel");
          const auto& group = bidders[pick.channel];
          const std::vector<std::size_t> contenders(pick.contenders.begin(),
                                                    pick.contenders.end());
          if (contenders != group)
            fail(&SortAudit::trace_consistent, "contenders differ from replay");
          if (pick.kind == PickKind::unique && group.size() != 1)
            fail(&SortAudit::trace_consistent, "contested pick marked unique");
          if (pick.kind == PickKind::conflict_winner) {
            ++audit.conflicts;
            for (std::size_t other : group) {
              const double wo = weight(other, pick.channel);
              const double wm = weight(m, pick.channel);
              if (wo > wm || (wo == wm && other < m))
                fail(&SortAudit::weight_priority, "conflict won by a lower weight");
            }
          }
        }
        fixed_now.insert(m);
        rebuilt[m].push_back(pick.channel);
        used[m].insert(pick.channel);
        taken.insert(pick.channel);
      }
      if (fixed_now.empty()) {
        fail(&SortAudit::trace_consistent, "round fixed nobody");
        return audit;
      }
      // Everyone left waiting must have lost a contest this round.
      for (std::size_t m : waiting) {
        if (fixed_now.count(m)) continue;
        if (open[m].empty())
          fail(&SortAudit::trace_consistent, "member with no open channel left waiting");
      }
      for (std::size_t m : fixed_now) waiting.erase(m);
    }
  }
  if (cursor != trace.picks.size())
    fail(&SortAudit::trace_consistent, "trace has extra picks");
  for (std::size_t m = 0; m < members; ++m) {
    const std::vector<std::size_t> actual(plan.orderings[m].begin(),
                                          plan.orderings[m].end());
    if (rebuilt[m] != actual) fail(&SortAudit::trace_consistent, "replayed order differs");
  }

  // Same-rank repeats, checked from the final orders alone: all but one of
  // the members sharing the channel had nothing free once the others' rank-r
  // choices were known.
  for (std::size_t r = 0; r < k_count; ++r) {
    std::map<std::size_t, std::vector<std::size_t>> by_channel;
    for (std::size_t m = 0; m < members; ++m)
      by_channel[plan.orderings[m][r]].push_back(m);
    for (const auto& [k, group] : by_channel) {
      if (group.size() < 2) continue;
      ++audit.collisions;
      std::size_t stuck = 0;
      for (std::size_t m : group) {
        std::set<std::size_t> blocked(plan.orderings[m].begin(),
                                      plan.orderings[m].begin() + static_cast<long>(r));
        for (std::size_t o = 0; o < members; ++o)
          if (o != m) blocked.insert(plan.orderings[o][r]);
        if (blocked.size() == k_count) ++stuck;
      }
      if (stuck + 1 < group.size())
        fail(&SortAudit::collisions_forced, "collision without an empty-candidate witness");
    }
  }
  return audit;
}

double sum_rate(const TwoByTwo& problem,
                const std::array<std::array<double, 2>, 2>& powers) {
  double total = 0.0;
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t c = 0; c < 2; ++c) {
      const std::size_t o = 1 - m;
      const double sinr = problem.gains[m][c] * powers[m][c] /
                          (problem.noise + problem.fixed[m][c] +
                           problem.gains[o][c] * powers[o][c]);
      total += std::log2(1.0 + sinr);
    }
  return total;
}

double grid_optimum(const TwoByTwo& problem, std::size_t steps) {
  double best = 0.0;
  for (std::size_t i = 0; i <= steps; ++i)
    for (std::size_t j = 0; j <= steps; ++j) {
      const double a = problem.p_max * static_cast<double>(i) / static_cast<double>(steps);
      const double b = problem.p_max * static_cast<double>(j) / static_cast<double>(steps);
      best = std::max(best, sum_rate(problem, {{{a, problem.p_max - a},
                                                {b, problem.p_max - b}}}));
    }
  return best;
}

namespace {

struct CoalitionFacts {
  std::vector<std::size_t> members;
  std::vector<std::size_t> pooled;
  std::vector<std::vector<std::size_t>> orders;
  std::map<std::vector<std::size_t>, double> outcomes;
  std::vector<double> tau;
  std::vector<std::vector<double>> transmit;  // [member][channel id]
};

// Rank-by-rank proposals with conflict resolution, written independently.
std::vector<std::vector<std::size_t>> straight_sort(
    const Scenario& sc, const std::vector<std::size_t>& members,
    const std::vector<std::size_t>& pooled) {
  const auto w = [&](std::size_t m, std::size_t k) {
    return sc.theta(k) * sc.gains().gain(members[m], k);
  };
  const auto better = [&](std::size_t m, std::size_t a, std::size_t b) {
    return w(m, a) > w(m, b) || (w(m, a) == w(m, b) && a < b);
  };
  std::vector<std::vector<std::size_t>> orders(members.size());
  for (std::size_t r = 0; r < pooled.size(); ++r) {
    std::set<std::size_t> taken;
    std::vector<std::size_t> waiting(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) waiting[m] = m;
    while (!waiting.empty()) {
      std::map<std::size_t, std::vector<std::size_t>> bids;
      std::vector<std::pair<std::size_t, std::size_t>> picks;
      for (std::size_t m : waiting) {
        std::size_t best_open = kNone;
        std::size_t best_any = kNone;
        for (std::size_t k : pooled) {
          if (std::count(orders[m].begin(), orders[m].end(), k)) continue;
          if (best_any == kNone || better(m, k, best_any)) best_any = k;
          if (!taken.count(k) && (best_open == kNone || better(m, k, best_open)))
            best_open = k;
        }
        if (best_open == kNone)
          picks.emplace_back(m, best_any);
        else
          bids[best_open].push_back(m);
      }
      std::vector<std::size_t> losers;
      for (auto& [k, who] : bids) {
        std::size_t win = who.front();
        for (std::size_t m : who)
          if (w(m, k) > w(win, k)) win = m;
        picks.emplace_back(win, k);
        for (std::size_t m : who)
          if (m != win) losers.push_back(m);
      }
      for (auto& [m, k] : picks) {
        orders[m].push_back(k);
        taken.insert(k);
      }
      std::sort(losers.begin(), losers.end());
      waiting = losers;
    }
  }
  return orders;
}

CoalitionFacts facts_for(const Scenario& sc, const Coalition& coalition) {
  CoalitionFacts f;
  f.members.assign(coalition.begin(), coalition.end());
  std::set<std::size_t> pooled;
  for (SuId su : coalition)
    pooled.insert(sc.su(su).known_channels.begin(), sc.su(su).known_channels.end());
  f.pooled.assign(pooled.begin(), pooled.end());
  f.orders = straight_sort(sc, f.members, f.pooled);

  std::vector<double> thetas(sc.n_channels());
  for (std::size_t k = 0; k < sc.n_channels(); ++k) thetas[k] = sc.theta(k);
  f.outcomes = outcome_distribution(f.orders, thetas);

  const double alpha = sc.phys().alpha;
  for (const auto& o : f.orders) {
    std::vector<double> ordered;
    for (std::size_t k : o) ordered.push_back(thetas[k]);
    f.tau.push_back(sensing_time(ordered, alpha));
  }
  f.transmit.assign(f.members.size(), std::vector<double>(sc.n_channels(), 0.0));
  for (const auto& [choice, p] : f.outcomes)
    for (std::size_t m = 0; m < choice.size(); ++m)
      if (choice[m] != kNone) f.transmit[m][choice[m]] += p;
  return f;
}

}  // namespace

std::vector<double> straight_line_payoffs(const Scenario& sc,
                                          const Partition& partition) {
  const double p_max = sc.phys().p_max_mw;
  const double noise = sc.phys().noise_mw;
  std::vector<CoalitionFacts> facts;
  for (const auto& c : partition.coalitions()) facts.push_back(facts_for(sc, c));

  std::vector<double> payoff(sc.n_sus(), 0.0);
  for (std::size_t c = 0; c < facts.size(); ++c) {
    const auto& f = facts[c];
    std::vector<double> outside(sc.n_channels(), 0.0);
    for (std::size_t o = 0; o < facts.size(); ++o) {
      if (o == c) continue;
      for (std::size_t m = 0; m < facts[o].members.size(); ++m)
        for (std::size_t k = 0; k < sc.n_channels(); ++k)
          outside[k] += sc.gains().gain(facts[o].members[m], k) * p_max *
                        facts[o].transmit[m][k];
    }

    std::vector<double> capacity(f.members.size(), 0.0);
    for (const auto& [choice, prob] : f.outcomes) {
      std::map<std::size_t, std::vector<std::size_t>> by_rank;
      for (std::size_t m = 0; m < choice.size(); ++m)
        if (choice[m] != kNone) by_rank[index_in(f.orders[m], choice[m])].push_back(m);

      std::vector<double> heard(sc.n_channels(), 0.0);  // earlier groups at the BS
      for (const auto& [rank, group] : by_rank) {
        std::set<std::size_t> chosen;
        for (std::size_t m : group) chosen.insert(choice[m]);
        const std::vector<std::size_t> chans(chosen.begin(), chosen.end());

        RateContext ctx(group.size(), chans.size(), noise);
        for (std::size_t g = 0; g < group.size(); ++g)
          for (std::size_t j = 0; j < chans.size(); ++j) {
            ctx.gains[g * chans.size() + j] = sc.gains().gain(f.members[group[g]], chans[j]);
            ctx.fixed_interference[g * chans.size() + j] = outside[chans[j]] + heard[chans[j]];
          }
        const auto alloc = allocate(ctx, p_max);

        for (std::size_t g = 0; g < group.size(); ++g) {
          double rate = 0.0;
          for (std::size_t j = 0; j < chans.size(); ++j) {
            const double p = alloc.p[g * chans.size() + j];
            if (p <= 0.0) continue;
            double others = 0.0;
            for (std::size_t h = 0; h < group.size(); ++h)
              if (h != g) others += ctx.gains[h * chans.size() + j] * alloc.p[h * chans.size() + j];
            rate += std::log2(1.0 + p * ctx.gains[g * chans.size() + j] /
                                        (noise + ctx.fixed_interference[g * chans.size() + j] + others));
          }
          capacity[group[g]] += prob * rate;
        }
        for (std::size_t g = 0; g < group.size(); ++g)
          for (std::size_t j = 0; j < chans.size(); ++j)
            heard[chans[j]] += ctx.gains[g * chans.size() + j] * alloc.p[g * chans.size() + j];
      }
    }
    for (std::size_t m = 0; m < f.members.size(); ++m)
      payoff[f.members[m]] = capacity[m] * (1.0 - f.tau[m]);
  }
  return payoff;
}

}  // namespace crn::oracle
