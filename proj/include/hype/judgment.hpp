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

#ifndef HYPE_JUDGMENT_HPP_
#define HYPE_JUDGMENT_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hype {

enum class Label { kReal, kFake };

enum class SessionMode { kTime, kInfinity, kQualification };

std::string_view to_string(Label label);
std::string_view to_string(SessionMode mode);

// Throw Error(kInput) on unknown names.
Label parse_label(std::string_view text);
SessionMode parse_session_mode(std::string_view text);

constexpr Label opposite(Label label) {
  return label == Label::kReal ? Label::kFake : Label::kReal;
}

// A single real/fake decision. `exposure_ms` is the commanded exposure and
// is present exactly for time-mode sessions.
struct Judgment {
  std::string evaluator_id;
  std::string image_id;
  Label truth = Label::kReal;
  Label answer = Label::kReal;
  std::optional<std::chrono::milliseconds> exposure_ms;
  int64_t submitted_at_ms = 0;
  std::optional<double> measured_exposure_ms;

  bool correct() const { return truth == answer; }

  bool operator==(const Judgment&) const = default;
};

}  // namespace hype

#endif  // HYPE_JUDGMENT_HPP_
