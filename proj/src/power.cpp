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

#include "crn/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crn/error.hpp"

namespace crn {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double in_group_interference(const PowerAllocation& a, const RateContext& ctx,
                             std::size_t member, std::size_t channel) {
  double sum = 0.0;
  for (std::size_t j = 0; j < ctx.members; ++j)
    if (j != member) sum += ctx.gain(j, channel) * a.at(j, channel);
  return sum;
}

// Euclidean projection of `v` onto {x >= 0, sum x = total}.
void project_to_simplex(std::span<double> v, double total,
                        std::vector<double>& u) {
  u.assign(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - total) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) shift = candidate;
  }
  for (double& x : v) x = std::max(x - shift, 0.0);
}

// d(sum-rate)/dp for every entry.
void sum_rate_gradient(const PowerAllocation& a, const RateContext& ctx,
                       std::vector<double>& grad) {
  const std::size_t m_count = ctx.members;
  const std::size_t c_count = ctx.channels;
  grad.assign(m_count * c_count, 0.0);
  std::vector<double> total(c_count, 0.0);  // received power per channel
  for (std::size_t c = 0; c < c_count; ++c)
    for (std::size_t j = 0; j < m_count; ++j)
      total[c] += ctx.gain(j, c) * a.at(j, c);
  std::vector<double> own(m_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    // Each member j's SINR denominator D_j and its own signal S_j.
    double cross = 0.0;  // sum_j S_j / (D_j (D_j + S_j))
    for (std::size_t j = 0; j < m_count; ++j) {
      const double s = ctx.gain(j, c) * a.at(j, c);
      const double d = ctx.noise + ctx.fixed(j, c) + total[c] - s;
      own[j] = ctx.gain(j, c) / (d + s);
      cross += s / (d * (d + s));
    }
    for (std::size_t i = 0; i < m_count; ++i) {
      const double s = ctx.gain(i, c) * a.at(i, c);
      const double d = ctx.noise + ctx.fixed(i, c) + total[c] - s;
      const double others = cross - s / (d * (d + s));
      grad[i * c_count + c] = (own[i] - ctx.gain(i, c) * others) / kLn2;
    }
  }
}

// Projected gradient ascent with Armijo backtracking.
double polish(PowerAllocation& a, const RateContext& ctx, double p_max,
              std::size_t iterations) {
  double value = sum_rate(a, ctx);
  std::vector<double> grad;
  std::vector<double> scratch;
  PowerAllocation trial;
  double step = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    sum_rate_gradient(a, ctx, grad);
    double scale = 0.0;
    for (double g : grad) scale = std::max(scale, std::abs(g));
    if (!(scale > 0.0)) break;
    if (step == 0.0) step = 0.1 * p_max / scale;
    bool accepted = false;
    trial = a;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < a.p.size(); ++i)
        trial.p[i] = a.p[i] + step * grad[i];
      for (std::size_t m = 0; m < ctx.members; ++m)
        project_to_simplex(trial.row(m), p_max, scratch);
      double ascent = 0.0;
      for (std::size_t i = 0; i < a.p.size(); ++i)
        ascent += grad[i] * (trial.p[i] - a.p[i]);
      const double v = sum_rate(trial, ctx);
      if (v >= value + 1e-4 * ascent && v >= value) {
        accepted = true;
        const double gain = v - value;
        std::swap(a.p, trial.p);
        value = v;
        step *= 2.0;
        if (gain < 1e-10 * std::max(1.0, value)) return value;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return value;
}

}  // namespace

double group_capacity(const PowerAllocation& alloc, const RateContext& ctx,
                      std::size_t member, std::size_t channel) {
  const double p = alloc.at(member, channel);
  if (p <= 0.0) return 0.0;
  const double denom = ctx.noise + ctx.fixed(member, channel) +
                       in_group_interference(alloc, ctx, member, channel);
  return std::log2(1.0 + p * ctx.gain(member, channel) / denom);
}

double member_capacity(const PowerAllocation& alloc, const RateContext& ctx,
                       std::size_t member) {
  double c = 0.0;
  for (std::size_t k = 0; k < ctx.channels; ++k)
    c += group_capacity(alloc, ctx, member, k);
  return c;
}

double sum_rate(const PowerAllocation& alloc, const RateContext& ctx) {
  double total = 0.0;
  for (std::size_t k = 0; k < ctx.channels; ++k) {
    double received = 0.0;
    for (std::size_t m = 0; m < ctx.members; ++m)
      received += ctx.gain(m, k) * alloc.at(m, k);
    for (std::size_t m = 0; m < ctx.members; ++m) {
      const double p = alloc.at(m, k);
      if (p <= 0.0) continue;
      const double s = ctx.gain(m, k) * p;
      total += std::log2(1.0 + s / (ctx.noise + ctx.fixed(m, k) + (received - s)));
    }
  }
  return total;
}

namespace {

// Writes the waterfilling solution into `out`; `order` is scratch space.
void waterfill_into(std::span<const double> ratios, double p_max,
                    std::span<double> out, std::vector<std::size_t>& order) {
  const std::size_t n = ratios.size();
  std::fill(out.begin(), out.end(), 0.0);
  if (n == 0) return;
  order.clear();
  for (std::size_t k = 0; k < n; ++k)
    if (ratios[k] > 0.0) order.push_back(k);
  if (order.empty()) {
    std::fill(out.begin(), out.end(), p_max / static_cast<double>(n));
    return;
  }
  if (order.size() == 1) {
    out[order.front()] = p_max;
    return;
  }
  // Insertion sort: stable, allocation-free, and n is a handful of channels.
  for (std::size_t i = 1; i < order.size(); ++i) {
    const std::size_t key = order[i];
    std::size_t j = i;
    for (; j > 0 && ratios[order[j - 1]] < ratios[key]; --j) order[j] = order[j - 1];
    order[j] = key;
  }
  // Largest active set whose water level clears the weakest active floor.
  double inv_sum = 0.0;
  double level = 0.0;
  std::size_t active = 0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double floor = 1.0 / ratios[order[j]];
    const double candidate =
        (p_max + inv_sum + floor) / static_cast<double>(j + 1);
    if (j > 0 && candidate <= floor) break;
    inv_sum += floor;
    level = candidate;
    active = j + 1;
  }
  if (active == 1) {
    out[order.front()] = p_max;
    return;
  }
  double assigned = 0.0;
  for (std::size_t j = 0; j < active; ++j) {
    const std::size_t k = order[j];
    out[k] = std::max(level - 1.0 / ratios[k], 0.0);
    assigned += out[k];
  }
  // Absorb rounding so the budget holds to the last ulp or so.
  if (assigned > 0.0)
    for (std::size_t j = 0; j < active; ++j) out[order[j]] *= p_max / assigned;
}

}  // namespace

std::vector<double> waterfill(std::span<const double> ratios, double p_max) {
  std::vector<double> out(ratios.size(), 0.0);
  std::vector<std::size_t> order;
  waterfill_into(ratios, p_max, out, order);
  return out;
}

AllocationReport allocate_report(const RateContext& ctx, double p_max,
                                 const SolverParams& params) {
  if (ctx.members == 0 || ctx.channels == 0)
    throw Error(ErrorKind::invalid_input, "empty power allocation problem");
  if (!(p_max > 0.0))
    throw Error(ErrorKind::invalid_input, "power budget must be positive");

  const std::size_t m_count = ctx.members;
  const std::size_t c_count = ctx.channels;
  AllocationReport report;
  std::vector<double> ratios(c_count);

  if (m_count == 1) {
    for (std::size_t k = 0; k < c_count; ++k)
      ratios[k] = ctx.gain(0, k) / (ctx.noise + ctx.fixed(0, k));
    report.allocation = PowerAllocation(1, c_count);
    const auto p = waterfill(ratios, p_max);
    std::copy(p.begin(), p.end(), report.allocation.p.begin());
    report.sum_rate = sum_rate(report.allocation, ctx);
    report.best_history.push_back(report.sum_rate);
    report.converged = true;
    return report;
  }

  // Stage 1: damped best-response waterfilling.
  PowerAllocation current(m_count, c_count);
  std::fill(current.p.begin(), current.p.end(),
            p_max / static_cast<double>(c_count));
  PowerAllocation best = current;
  double best_rate = sum_rate(current, ctx);
  double previous = best_rate;
  std::vector<double> received(c_count, 0.0);
  for (std::size_t k = 0; k < c_count; ++k)
    for (std::size_t j = 0; j < m_count; ++j) received[k] += ctx.gain(j, k) * current.at(j, k);
  std::vector<double> response(c_count);
  std::vector<std::size_t> scratch;
  scratch.reserve(c_count);
  for (std::size_t sweep = 0; sweep < params.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < m_count; ++i) {
      auto row = current.row(i);
      for (std::size_t k = 0; k < c_count; ++k) {
        const double others = std::max(received[k] - ctx.gain(i, k) * row[k], 0.0);
        ratios[k] = ctx.gain(i, k) / (ctx.noise + ctx.fixed(i, k) + others);
      }
      waterfill_into(ratios, p_max, response, scratch);
      for (std::size_t k = 0; k < c_count; ++k) {
        const double next = (1.0 - params.damping) * row[k] + params.damping * response[k];
        received[k] += ctx.gain(i, k) * (next - row[k]);
        row[k] = next;
      }
    }
    const double rate = sum_rate(current, ctx);
    if (rate > best_rate) {
      best_rate = rate;
      best = current;
    }
    report.best_history.push_back(best_rate);
    report.sweeps = sweep + 1;
    if (std::abs(rate - previous) < params.tolerance) {
      report.converged = true;
      break;
    }
    previous = rate;
  }

  // Stage 2: refine the best iterate and single-channel corners.
  std::vector<PowerAllocation> starts{best};
  std::size_t corner_count = 1;
  bool all_corners = true;
  for (std::size_t m = 0; m < m_count && all_corners; ++m) {
    corner_count *= c_count;
    if (corner_count > params.vertex_start_limit) all_corners = false;
  }
  if (all_corners) {
    std::vector<std::size_t> pick(m_count, 0);
    for (std::size_t n = 0; n < corner_count; ++n) {
      PowerAllocation v(m_count, c_count);
      for (std::size_t m = 0; m < m_count; ++m) v.at(m, pick[m]) = p_max;
      starts.push_back(std::move(v));
      for (std::size_t m = 0; m < m_count; ++m) {
        if (++pick[m] < c_count) break;
        pick[m] = 0;
      }
    }
  } else {
    for (std::size_t shift = 0; shift < c_count; ++shift) {
      PowerAllocation v(m_count, c_count);
      for (std::size_t m = 0; m < m_count; ++m) v.at(m, (m + shift) % c_count) = p_max;
      starts.push_back(std::move(v));
    }
  }
  // Corners are cheap to score; only the most promising ones are refined.
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 1; i < starts.size(); ++i)
    ranked.emplace_back(-sum_rate(starts[i], ctx), i);
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::size_t> refine{0};
  for (std::size_t i = 0; i < ranked.size() && i < params.polished_corners; ++i)
    refine.push_back(ranked[i].second);
  for (std::size_t idx : refine) {
    auto& start = starts[idx];
    const double rate = polish(start, ctx, p_max, params.polish_iterations);
    if (rate > best_rate) {
      best_rate = rate;
      best = start;
    }
  }
  report.best_history.push_back(best_rate);
  report.allocation = std::move(best);
  report.sum_rate = best_rate;
  return report;
}

PowerAllocation allocate(const RateContext& ctx, double p_max,
                         const SolverParams& params) {
  return allocate_report(ctx, p_max, params).allocation;
}

}  // namespace crn
