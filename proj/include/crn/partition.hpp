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

#ifndef CRN_PARTITION_HPP
#define CRN_PARTITION_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crn/scenario.hpp"

namespace crn {

/// Ascending SU ids.
using Coalition = std::vector<SuId>;
using CoalitionMask = std::uint64_t;

CoalitionMask mask_of(const Coalition& coalition);

/// Disjoint cover of the SUs 0..n-1, kept in canonical order: members
/// ascending, coalitions ordered by their smallest member.
class Partition {
 public:
  Partition() = default;
  /// Validates that `coalitions` are non-empty, disjoint and cover 0..n-1.
  Partition(std::vector<Coalition> coalitions, std::size_t n_sus);

  static Partition singletons(std::size_t n_sus);
  static Partition grand(std::size_t n_sus);

  const std::vector<Coalition>& coalitions() const noexcept { return coalitions_; }
  const Coalition& operator[](std::size_t i) const { return coalitions_.at(i); }
  std::size_t size() const noexcept { return coalitions_.size(); }
  std::size_t n_sus() const noexcept { return owner_.size(); }

  /// Index of the coalition holding `su`.
  std::size_t coalition_of(SuId su) const { return owner_.at(su); }

  /// `su` leaves its coalition and joins coalition `destination`, or goes
  /// solo when `destination` is empty.
  Partition with_move(SuId su, std::optional<std::size_t> destination) const;

  /// Compact text form, e.g. "{0,3}{1}{2}".
  std::string fingerprint() const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.coalitions_ == b.coalitions_;
  }

 private:
  void index();

  std::vector<Coalition> coalitions_;
  std::vector<std::size_t> owner_;
};

/// Calls `visit` once for every set partition of {0..n-1} (restricted growth
/// strings, so each partition appears exactly once).
void for_each_partition(std::size_t n,
                        const std::function<void(const Partition&)>& visit);

/// Bell numbers up to n = 25 fit in 64 bits.
std::uint64_t bell_number(std::size_t n);

}  // namespace crn

#endif  // CRN_PARTITION_HPP
