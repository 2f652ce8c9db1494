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

#ifndef CRN_RNG_HPP
#define CRN_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>

namespace crn {

/// Draw categories. Each category gets its own engine derived from the run
/// seed, so adding draws to one category never shifts the values of another.
enum class Stream : std::uint64_t {
  positions = 1,
  thetas = 2,
  fading = 3,
  subsets = 4,
  formation = 5,
  mobility = 6,
  traffic = 7,
  refading = 8,
  experiment = 9,
};

/// SplitMix64 finalizer, used to derive engine seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Portable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Library distributions are implementation-defined, so every
/// transform below is written out here to keep draws identical across
/// toolchains.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::size_t below(std::size_t n);

  /// Rayleigh amplitude with E[a^2] = 1 (inverse CDF).
  double rayleigh();

 private:
  std::mt19937_64 engine_;
};

}  // namespace crn

#endif  // CRN_RNG_HPP
