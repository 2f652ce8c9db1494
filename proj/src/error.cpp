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

#include "crn/error.hpp"

namespace crn {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_config: return "invalid_config";
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::enumeration_limit: return "enumeration_limit";
    case ErrorKind::size_limit: return "size_limit";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace crn
