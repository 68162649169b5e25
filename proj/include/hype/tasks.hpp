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

// Per-evaluator task assignment, qualification screening and payment.

#ifndef HYPE_TASKS_HPP_
#define HYPE_TASKS_HPP_

#include <cstdint>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hype/judgment.hpp"
#include "hype/pool.hpp"
#include "hype/staircase.hpp"

namespace hype {

struct Stimulus {
  std::string image_id;
  Label truth = Label::kReal;
  int block = 0;

  bool operator==(const Stimulus&) const = default;
};

// Block layout of a session: `blocks` x `per_block` stimuli with exactly
// `fakes_per_block` fakes in each block.
struct TaskShape {
  int blocks = 1;
  int per_block = 100;
  int fakes_per_block = 50;

  int total() const { return blocks * per_block; }
  int reals_per_block() const { return per_block - fakes_per_block; }

  static TaskShape infinity() { return {1, 100, 50}; }
  static TaskShape qualification() { return {1, 100, 50}; }
  // Throws Error(kConfiguration) unless fake_fraction splits a block evenly.
  static TaskShape time(const StaircaseConfig& config);

  bool operator==(const TaskShape&) const = default;
};

struct TaskAssignment {
  std::string run_id;
  std::string evaluator_id;
  SessionMode mode = SessionMode::kInfinity;
  TaskShape shape;
  // Presentation order. Truth labels stay on the server.
  std::vector<Stimulus> stimuli;
  // Composition notice the client must show before the first trial.
  std::string disclosure;

  std::size_t size() const { return stimuli.size(); }
};

std::string disclosure_text(SessionMode mode, const TaskShape& shape,
                            double qualification_threshold = 0.65);

// Deterministic in (run_seed, evaluator_id). Draws reals and fakes without
// replacement from the pool, skipping `exclude`, then shuffles each block.
// Throws Error(kCapacity) if the pool cannot fill the shape.
TaskAssignment make_assignment(const ImagePool& pool, const std::string& run_id,
                               const std::string& evaluator_id, SessionMode mode,
                               const TaskShape& shape, uint64_t run_seed,
                               const std::set<std::string>& exclude = {});

// Enforces one assignment per evaluator per run (between-subjects) and the
// qualification gate. Thread-safe.
class RunAssignments {
 public:
  RunAssignments(std::string run_id, uint64_t run_seed, SessionMode mode, TaskShape shape);

  // Throws Error(kAuthorization) for an unqualified evaluator in a scored
  // mode and Error(kBetweenSubjects) on a repeat.
  TaskAssignment assign(const ImagePool& pool, const std::string& evaluator_id,
                        bool qualified, const std::set<std::string>& exclude = {});

  bool contains(const std::string& evaluator_id) const;
  std::size_t assigned_count() const;

 private:
  std::string run_id_;
  uint64_t run_seed_;
  SessionMode mode_;
  TaskShape shape_;
  mutable std::mutex mu_;
  std::set<std::string> assigned_;
};

// Splits `total_fakes` across `n_models` as evenly as possible; the models
// receiving the remainder are chosen by a seeded draw.
std::vector<int> qualification_fake_split(int total_fakes, std::size_t n_models,
                                          uint64_t seed);

// Qualification task: reals from the union of the pools' reals, fakes split
// across the distinct models found in the pools. Fewer than two models is an
// input error unless `allow_single_model`.
TaskAssignment build_qualification(std::span<const ImagePool> pools, uint64_t seed,
                                   const std::string& evaluator_id,
                                   bool allow_single_model = false,
                                   TaskShape shape = TaskShape::qualification());

struct QualificationRule {
  double threshold = 0.65;
  // When false, overall accuracy is compared against the threshold instead.
  bool require_both_classes = true;
  int expected_reals = 50;
  int expected_fakes = 50;

  bool passes(int real_correct, int n_real, int fake_correct, int n_fake) const;
};

struct QualificationResult {
  std::string evaluator_id;
  double real_accuracy = 0.0;
  double fake_accuracy = 0.0;
  bool passed = false;
  double threshold = 0.65;
};

// Throws Error(kState) unless the judgments form a complete session.
QualificationResult grade_qualification(std::span<const Judgment> judgments,
                                        const QualificationRule& rule = {});

// Whole cents, so totals like 1.00 + 83 x 0.02 are exact.
struct Usd {
  int64_t cents = 0;

  double dollars() const { return static_cast<double>(cents) / 100.0; }
  std::string str() const;  // "2.66"

  auto operator<=>(const Usd&) const = default;
  Usd operator+(Usd other) const { return {cents + other.cents}; }
};

struct PaymentRates {
  Usd base{100};
  Usd bonus_per_correct{2};
};

struct PaymentStatement {
  std::string evaluator_id;
  Usd base;
  Usd bonus;
  Usd total;
};

// Base pay once the qualification task was completed, plus a bonus per
// correct main-task judgment.
PaymentStatement compute_payment(const std::string& evaluator_id, bool qualified,
                                 std::span<const Judgment> judgments,
                                 const PaymentRates& rates = {});

Usd running_bonus(int correct_answers, const PaymentRates& rates = {});

}  // namespace hype

#endif  // HYPE_TASKS_HPP_
