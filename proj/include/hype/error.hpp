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

#ifndef HYPE_ERROR_HPP_
#define HYPE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hype {

// Every failure raised by the library carries one of these kinds so the
// service layer can map it onto a wire status without string matching.
enum class ErrorKind {
  kConfiguration,
  kState,
  kInput,
  kCapacity,
  kAuthorization,
  kBetweenSubjects,
  kReference,
  kConflict,
  kValidation,
  kSequencing,
  kTerminal,
  kNotFound,
  kCorruption,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by log replay; `offset` is the zero-based line index of the first
// entry that breaks ordering or cannot be parsed.
class CorruptionError : public Error {
 public:
  CorruptionError(std::size_t offset, const std::string& message)
      : Error(ErrorKind::kCorruption, message), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hype

#endif  // HYPE_ERROR_HPP_
