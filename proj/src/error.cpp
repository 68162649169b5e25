// Copyright 2026 The hype-bench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hype/error.hpp"

namespace hype {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kState: return "state";
    case ErrorKind::kInput: return "input";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kAuthorization: return "authorization";
    case ErrorKind::kBetweenSubjects: return "between_subjects";
    case ErrorKind::kReference: return "reference";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kSequencing: return "sequencing";
    case ErrorKind::kTerminal: return "terminal";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kCorruption: return "corruption";
  }
  return "unknown";
}

}  // namespace hype
