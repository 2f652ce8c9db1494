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

#ifndef CRN_ERROR_HPP
#define CRN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace crn {

enum class ErrorKind {
  invalid_config,
  invalid_input,
  enumeration_limit,
  size_limit,
  non_convergence,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure the library reports. `key()` names the
/// offending configuration key when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string key = {})
      : std::runtime_error(message), kind_(kind), key_(std::move(key)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& key() const noexcept { return key_; }

 private:
  ErrorKind kind_;
  std::string key_;
};

}  // namespace crn

#endif  // CRN_ERROR_HPP
