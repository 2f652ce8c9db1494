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

#ifndef CRN_ORACLES_SUITES_HPP
#define CRN_ORACLES_SUITES_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace crn::oracle {

/// Outcome of one randomized comparison between the library and a
/// brute-force reference. `max_error` is the largest discrepancy seen, in the
/// suite's own unit (absolute unless stated).
struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string note;
  double seconds = 0.0;

  bool passed() const { return cases > 0 && failures == 0; }
};

/// Random coalitions with |S| <= 3 and K_S <= 6: every stored tuple against
/// the availability-pattern oracle (and every oracle outcome with positive
/// mass present in the library's list), plus normalization within 1e-9.
SuiteResult probability_suite(std::size_t count, std::uint64_t seed);

/// Random orderings with K <= 10 against pattern enumeration.
SuiteResult sensing_suite(std::size_t count, std::uint64_t seed);

/// Random coalitions sorted with a trace, then audited by replay.
SuiteResult sort_suite(std::size_t count, std::uint64_t seed);

/// Random 2 x 2 power problems against a P/100 grid search. `max_error` is
/// the worst relative shortfall (negative when the solver beats the grid).
SuiteResult power_suite(std::size_t count, std::uint64_t seed);

/// Random N = 4 partitions against the straight-line evaluator (relative).
SuiteResult partition_suite(std::size_t count, std::uint64_t seed);

/// All-singleton valuation against the non-cooperative utilities.
SuiteResult singleton_suite(std::size_t count, std::uint64_t seed);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed);

}  // namespace crn::oracle

#endif  // CRN_ORACLES_SUITES_HPP
