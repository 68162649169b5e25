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

#include "hype/staircase.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "hype/error.hpp"

namespace hype {

void StaircaseConfig::validate() const {
  if (min_exposure.count() <= 0) {
    fail(ErrorKind::kConfiguration, "min_exposure must be positive");
  }
  if (!(min_exposure <= start_exposure && start_exposure <= max_exposure)) {
    fail(ErrorKind::kConfiguration,
         "exposures must satisfy min <= start <= max");
  }
  if (step_down_on_correct.count() <= 0 || step_up_on_incorrect.count() <= 0) {
    fail(ErrorKind::kConfiguration, "staircase steps must be positive");
  }
  if (trials_per_block <= 0) {
    fail(ErrorKind::kConfiguration, "trials_per_block must be positive");
  }
  if (blocks_per_session <= 0) {
    fail(ErrorKind::kConfiguration, "blocks_per_session must be positive");
  }
  if (!(fake_fraction > 0.0 && fake_fraction < 1.0)) {
    fail(ErrorKind::kConfiguration, "fake_fraction must lie in (0, 1)");
  }
}

double StaircaseConfig::target_accuracy() const {
  const double up = static_cast<double>(step_up_on_incorrect.count());
  const double down = static_cast<double>(step_down_on_correct.count());
  return up / (up + down);
}

StaircaseState start_block(const StaircaseConfig& config, int block_index) {
  config.validate();
  if (block_index < 0 || block_index >= config.blocks_per_session) {
    fail(ErrorKind::kConfiguration,
         "block index " + std::to_string(block_index) + " outside session of " +
             std::to_string(config.blocks_per_session) + " blocks");
  }
  StaircaseState state;
  state.config = config;
  state.block_index = block_index;
  state.current_exposure = config.start_exposure;
  state.history.reserve(static_cast<std::size_t>(config.trials_per_block));
  return state;
}

milliseconds next_exposure(const StaircaseConfig& config, milliseconds exposure,
                           bool correct) {
  const milliseconds moved = correct ? exposure - config.step_down_on_correct
                                     : exposure + config.step_up_on_incorrect;
  return std::clamp(moved, config.min_exposure, config.max_exposure);
}

StaircaseState record_judgment(StaircaseState state, bool correct) {
  if (state.complete()) {
    fail(ErrorKind::kState, "block already holds " +
                                std::to_string(state.config.trials_per_block) +
                                " trials");
  }
  state.history.push_back({state.current_exposure, correct});
  state.current_exposure =
      next_exposure(state.config, state.current_exposure, correct);
  return state;
}

BlockResult block_mode(const StaircaseState& state) {
  if (!state.complete()) {
    fail(ErrorKind::kState, "block incomplete: " +
                                std::to_string(state.trial_index()) + " of " +
                                std::to_string(state.config.trials_per_block) +
                                " trials");
  }
  // Ordered map: the first maximum met while iterating is the smallest tied
  // exposure.
  std::map<milliseconds, int> counts;
  int at_floor = 0;
  for (const Trial& trial : state.history) {
    ++counts[trial.exposure];
    if (trial.exposure == state.config.min_exposure) ++at_floor;
  }
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  BlockResult result;
  result.modal_exposure = best->first;
  result.trial_count = state.trial_index();
  result.floor_fraction =
      static_cast<double>(at_floor) / static_cast<double>(result.trial_count);
  return result;
}

SessionThreshold session_threshold(std::span<const BlockResult> blocks,
                                   std::string evaluator_id) {
  if (blocks.empty()) {
    fail(ErrorKind::kInput, "session threshold needs at least one block");
  }
  double sum = 0.0;
  for (const BlockResult& block : blocks) {
    sum += static_cast<double>(block.modal_exposure.count());
  }
  return {std::move(evaluator_id), sum / static_cast<double>(blocks.size())};
}

SessionStaircase::SessionStaircase(StaircaseConfig config)
    : config_(std::move(config)), current_(start_block(config_, 0)) {}

bool SessionStaircase::finished() const {
  return static_cast<int>(completed_.size()) >= config_.blocks_per_session;
}

milliseconds SessionStaircase::commanded_exposure() const {
  return current_.current_exposure;
}

int SessionStaircase::total_trials() const {
  return static_cast<int>(completed_.size()) * config_.trials_per_block +
         (finished() ? 0 : current_.trial_index());
}

void SessionStaircase::record(bool correct) {
  if (finished()) fail(ErrorKind::kState, "staircase session already finished");
  current_ = record_judgment(std::move(current_), correct);
  if (current_.complete()) {
    completed_.push_back(block_mode(current_));
    if (!finished()) {
      current_ = start_block(config_, static_cast<int>(completed_.size()));
    }
  }
}

SessionThreshold SessionStaircase::threshold(std::string evaluator_id) const {
  if (!finished()) {
    fail(ErrorKind::kState, "staircase session has unfinished blocks");
  }
  return session_threshold(completed_, std::move(evaluator_id));
}

}  // namespace hype
