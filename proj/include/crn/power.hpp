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

#ifndef CRN_POWER_HPP
#define CRN_POWER_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace crn {

/// Inputs of a same-rank group's power problem. Row-major member x channel.
struct RateContext {
  std::size_t members = 0;
  std::size_t channels = 0;
  std::vector<double> gains;
  /// Interference every member sees that the group does not control (other
  /// rank groups plus outsiders), mW.
  std::vector<double> fixed_interference;
  double noise = 0.0;

  RateContext() = default;
  RateContext(std::size_t m, std::size_t c, double noise_mw)
      : members(m),
        channels(c),
        gains(m * c, 0.0),
        fixed_interference(m * c, 0.0),
        noise(noise_mw) {}

  double gain(std::size_t m, std::size_t c) const { return gains[m * channels + c]; }
  double fixed(std::size_t m, std::size_t c) const {
    return fixed_interference[m * channels + c];
  }
};

/// Power per (member, channel) in mW.
struct PowerAllocation {
  std::size_t members = 0;
  std::size_t channels = 0;
  std::vector<double> p;

  PowerAllocation() = default;
  PowerAllocation(std::size_t m, std::size_t c) : members(m), channels(c), p(m * c, 0.0) {}

  double& at(std::size_t m, std::size_t c) { return p[m * channels + c]; }
  double at(std::size_t m, std::size_t c) const { return p[m * channels + c]; }
  std::span<double> row(std::size_t m) { return {p.data() + m * channels, channels}; }
  std::span<const double> row(std::size_t m) const {
    return {p.data() + m * channels, channels};
  }
};

struct SolverParams {
  double damping = 0.5;
  double tolerance = 1e-8;
  std::size_t max_sweeps = 200;
  /// Enumerate every single-channel corner as a start when there are at most
  /// this many; otherwise use cyclic channel-per-member corners only.
  std::size_t vertex_start_limit = 64;
  std::size_t polish_iterations = 300;
  /// Number of best-scoring corners refined alongside the best iterate.
  std::size_t polished_corners = 3;
};

struct AllocationReport {
  PowerAllocation allocation;
  double sum_rate = 0.0;
  /// Best sum-rate after each best-response sweep, then after polishing.
  std::vector<double> best_history;
  std::size_t sweeps = 0;
  bool converged = false;
};

/// log2(1 + p g / (noise + in-group interference + fixed)) for one entry.
double group_capacity(const PowerAllocation& alloc, const RateContext& ctx,
                      std::size_t member, std::size_t channel);

/// Sum over the member's channels.
double member_capacity(const PowerAllocation& alloc, const RateContext& ctx,
                       std::size_t member);

double sum_rate(const PowerAllocation& alloc, const RateContext& ctx);

/// Single-user waterfilling: maximizes sum_k log2(1 + r_k p_k) subject to
/// sum p = p_max, p >= 0. All-zero ratios fall back to an equal split.
std::vector<double> waterfill(std::span<const double> ratios, double p_max);

/// Group sum-rate maximization, every row summing to p_max.
///
/// Runs damped iterative best-response waterfilling from the equal split and
/// keeps the best iterate. Because best responses settle on a selfish
/// equilibrium rather than the sum-rate optimum, the best iterate and a set of
/// corner allocations are then refined by projected gradient ascent on the
/// sum-rate; the highest-scoring result is returned.
AllocationReport allocate_report(const RateContext& ctx, double p_max,
                                 const SolverParams& params = {});

PowerAllocation allocate(const RateContext& ctx, double p_max,
                         const SolverParams& params = {});

}  // namespace crn

#endif  // CRN_POWER_HPP
