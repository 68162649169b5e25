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

// Adaptive exposure staircase for timed real/fake judgments.
//
// Each block starts at `start_exposure` and moves after every response:
// a correct answer shortens the next exposure by `step_down_on_correct`,
// an incorrect one lengthens it by `step_up_on_incorrect`, always clamped
// to [min_exposure, max_exposure]. With 10ms down and 30ms up the walk has
// zero expected drift where p(correct) = 30 / (10 + 30) = 0.75, so the
// exposure settles around the evaluator's 75%-correct point.
//
// A block is summarized by its modal presented exposure; an evaluator's
// session threshold is the mean of the block modes.

#ifndef HYPE_STAIRCASE_HPP_
#define HYPE_STAIRCASE_HPP_

#include <chrono>
#include <span>
#include <string>
#include <vector>

namespace hype {

using std::chrono::milliseconds;

struct StaircaseConfig {
  milliseconds start_exposure{500};
  milliseconds min_exposure{100};
  milliseconds max_exposure{1000};
  milliseconds step_down_on_correct{10};
  milliseconds step_up_on_incorrect{30};
  int trials_per_block = 150;
  int blocks_per_session = 3;
  double fake_fraction = 0.5;

  // Throws Error(kConfiguration) if any invariant is violated.
  void validate() const;

  // Accuracy at which the expected step is zero: up / (up + down).
  double target_accuracy() const;

  bool operator==(const StaircaseConfig&) const = default;
};

struct Trial {
  milliseconds exposure;
  bool correct;

  bool operator==(const Trial&) const = default;
};

// One evaluator-block's walk. Values are immutable in spirit: operations
// take a state and return the successor.
struct StaircaseState {
  StaircaseConfig config;
  int block_index = 0;
  milliseconds current_exposure{0};
  std::vector<Trial> history;

  int trial_index() const { return static_cast<int>(history.size()); }
  bool complete() const { return trial_index() >= config.trials_per_block; }

  bool operator==(const StaircaseState&) const = default;
};

struct BlockResult {
  milliseconds modal_exposure{0};
  int trial_count = 0;
  // Fraction of trials presented at min_exposure ("bottoming out").
  double floor_fraction = 0.0;

  bool operator==(const BlockResult&) const = default;
};

struct SessionThreshold {
  std::string evaluator_id;
  double threshold_ms = 0.0;
};

StaircaseState start_block(const StaircaseConfig& config, int block_index);

// Exposure that follows `exposure` after a response, clamped to the range.
milliseconds next_exposure(const StaircaseConfig& config, milliseconds exposure,
                           bool correct);

StaircaseState record_judgment(StaircaseState state, bool correct);

// Most frequent presented exposure; ties go to the smallest exposure.
BlockResult block_mode(const StaircaseState& state);

SessionThreshold session_threshold(std::span<const BlockResult> blocks,
                                   std::string evaluator_id);

// Drives consecutive blocks for one evaluator. The service keeps one of
// these per time-mode session and the simulator uses it directly.
class SessionStaircase {
 public:
  explicit SessionStaircase(StaircaseConfig config);

  const StaircaseConfig& config() const { return config_; }
  const StaircaseState& current() const { return current_; }
  const std::vector<BlockResult>& completed_blocks() const { return completed_; }

  bool finished() const;
  milliseconds commanded_exposure() const;
  int total_trials() const;

  // Applies one response and rolls over to the next block when the current
  // one fills up. Throws Error(kState) once the session is finished.
  void record(bool correct);

  // Requires finished().
  SessionThreshold threshold(std::string evaluator_id) const;

 private:
  StaircaseConfig config_;
  StaircaseState current_;
  std::vector<BlockResult> completed_;
};

}  // namespace hype

#endif  // HYPE_STAIRCASE_HPP_
