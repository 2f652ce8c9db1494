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

#include "crn/partition.hpp"

#include <algorithm>

#include "crn/error.hpp"

namespace crn {

CoalitionMask mask_of(const Coalition& coalition) {
  CoalitionMask m = 0;
  for (SuId su : coalition) {
    if (su >= kMaxEntities)
      throw Error(ErrorKind::size_limit, "SU id exceeds mask width");
    m |= CoalitionMask{1} << su;
  }
  return m;
}

Partition::Partition(std::vector<Coalition> coalitions, std::size_t n_sus)
    : coalitions_(std::move(coalitions)) {
  std::vector<bool> seen(n_sus, false);
  for (auto& c : coalitions_) {
    if (c.empty()) throw Error(ErrorKind::invalid_input, "empty coalition");
    std::sort(c.begin(), c.end());
    for (SuId su : c) {
      if (su >= n_sus || seen[su])
        throw Error(ErrorKind::invalid_input,
                    "coalitions must be disjoint and within range");
      seen[su] = true;
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorKind::invalid_input, "coalitions do not cover every SU");
  index();
}

void Partition::index() {
  std::sort(coalitions_.begin(), coalitions_.end(),
            [](const Coalition& a, const Coalition& b) {
              return a.front() < b.front();
            });
  std::size_t n = 0;
  for (const auto& c : coalitions_) n += c.size();
  owner_.assign(n, 0);
  for (std::size_t i = 0; i < coalitions_.size(); ++i)
    for (SuId su : coalitions_[i]) owner_[su] = i;
}

Partition Partition::singletons(std::size_t n_sus) {
  std::vector<Coalition> cs;
  for (SuId i = 0; i < n_sus; ++i) cs.push_back({i});
  return Partition(std::move(cs), n_sus);
}

Partition Partition::grand(std::size_t n_sus) {
  Coalition all;
  for (SuId i = 0; i < n_sus; ++i) all.push_back(i);
  return Partition({all}, n_sus);
}

Partition Partition::with_move(SuId su,
                               std::optional<std::size_t> destination) const {
  const std::size_t from = coalition_of(su);
  if (destination && (*destination >= size() || *destination == from))
    throw Error(ErrorKind::invalid_input, "invalid switch destination");
  Partition out;
  out.coalitions_ = coalitions_;
  auto& source = out.coalitions_[from];
  source.erase(std::find(source.begin(), source.end(), su));
  const bool emptied = source.empty();
  if (destination) {
    auto& dest = out.coalitions_[*destination];
    dest.insert(std::upper_bound(dest.begin(), dest.end(), su), su);
  } else {
    out.coalitions_.push_back({su});  // invalidates `source`
  }
  if (emptied) out.coalitions_.erase(out.coalitions_.begin() + from);
  out.index();
  return out;
}

std::string Partition::fingerprint() const {
  std::string s;
  for (const auto& c : coalitions_) {
    s += '{';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(c[i]);
    }
    s += '}';
  }
  return s;
}

void for_each_partition(std::size_t n,
                        const std::function<void(const Partition&)>& visit) {
  if (n == 0) return;
  // a[i] is the block of element i; a[i] <= 1 + max(a[0..i-1]).
  std::vector<std::size_t> a(n, 0);
  std::vector<std::size_t> max_prefix(n, 0);
  for (;;) {
    std::size_t blocks = 0;
    for (std::size_t x : a) blocks = std::max(blocks, x + 1);
    std::vector<Coalition> cs(blocks);
    for (SuId i = 0; i < n; ++i) cs[a[i]].push_back(i);
    visit(Partition(std::move(cs), n));

    std::size_t i = n - 1;
    while (i > 0 && a[i] == max_prefix[i] + 1) --i;
    if (i == 0) return;
    ++a[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      max_prefix[j] = std::max(max_prefix[j - 1], a[j - 1]);
    }
  }
}

std::uint64_t bell_number(std::size_t n) {
  if (n > 25) throw Error(ErrorKind::size_limit, "Bell number overflows");
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace crn
