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

#include "hype/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "hype/error.hpp"
#include "hype/random.hpp"

namespace hype {
namespace {

constexpr uint64_t kRealStream = 1;
constexpr uint64_t kFakeStream = 2;
constexpr uint64_t kOrderStream = 3;
constexpr uint64_t kRemainderStream = 4;

std::vector<const ImageRecord*> eligible(const std::vector<ImageRecord>& images,
                                         const std::set<std::string>& exclude) {
  std::vector<const ImageRecord*> out;
  out.reserve(images.size());
  for (const ImageRecord& r : images) {
    if (!exclude.contains(r.image_id)) out.push_back(&r);
  }
  return out;
}

std::vector<const ImageRecord*> draw(const std::vector<const ImageRecord*>& from,
                                     std::size_t k, uint64_t seed, const char* what) {
  if (from.size() < k) {
    fail(ErrorKind::kCapacity, std::string("pool has ") + std::to_string(from.size()) +
                                   " eligible " + what + " images, task needs " +
                                   std::to_string(k));
  }
  std::vector<const ImageRecord*> out;
  out.reserve(k);
  for (std::size_t i : sample_without_replacement(from.size(), k, seed)) {
    out.push_back(from[i]);
  }
  return out;
}

}  // namespace

TaskShape TaskShape::time(const StaircaseConfig& config) {
  config.validate();
  const double fakes = config.fake_fraction * config.trials_per_block;
  const double rounded = std::round(fakes);
  if (std::fabs(fakes - rounded) > 1e-9) {
    fail(ErrorKind::kConfiguration,
         "fake_fraction does not split a block of " +
             std::to_string(config.trials_per_block) + " trials into whole images");
  }
  return {config.blocks_per_session, config.trials_per_block, static_cast<int>(rounded)};
}

std::string disclosure_text(SessionMode mode, const TaskShape& shape,
                            double qualification_threshold) {
  char buf[320];
  switch (mode) {
    case SessionMode::kTime:
      std::snprintf(buf, sizeof buf,
                    "Each of the %d blocks shows %d images: %d real and %d fake.",
                    shape.blocks, shape.per_block, shape.reals_per_block(),
                    shape.fakes_per_block);
      break;
    case SessionMode::kInfinity:
      std::snprintf(buf, sizeof buf, "This task shows %d images: %d real and %d fake.",
                    shape.total(), shape.reals_per_block() * shape.blocks,
                    shape.fakes_per_block * shape.blocks);
      break;
    case SessionMode::kQualification:
      std::snprintf(buf, sizeof buf,
                    "This qualification shows %d images: %d real and %d fake. To "
                    "qualify, correctly classify at least %.0f%% of the real images "
                    "and %.0f%% of the fake images.",
                    shape.total(), shape.reals_per_block() * shape.blocks,
                    shape.fakes_per_block * shape.blocks, 100.0 * qualification_threshold,
                    100.0 * qualification_threshold);
      break;
  }
  return buf;
}

TaskAssignment make_assignment(const ImagePool& pool, const std::string& run_id,
                               const std::string& evaluator_id, SessionMode mode,
                               const TaskShape& shape, uint64_t run_seed,
                               const std::set<std::string>& exclude) {
  if (shape.blocks <= 0 || shape.per_block <= 0 || shape.fakes_per_block < 0 ||
      shape.fakes_per_block > shape.per_block) {
    fail(ErrorKind::kConfiguration, "invalid task shape");
  }
  const uint64_t seed = derive_seed(run_seed, hash_id(evaluator_id));
  const auto n_reals = static_cast<std::size_t>(shape.reals_per_block() * shape.blocks);
  const auto n_fakes = static_cast<std::size_t>(shape.fakes_per_block * shape.blocks);
  const auto reals = draw(eligible(pool.real_images, exclude), n_reals,
                          derive_seed(seed, kRealStream), "real");
  const auto fakes = draw(eligible(pool.fake_images, exclude), n_fakes,
                          derive_seed(seed, kFakeStream), "fake");

  TaskAssignment task;
  task.run_id = run_id;
  task.evaluator_id = evaluator_id;
  task.mode = mode;
  task.shape = shape;
  task.disclosure = disclosure_text(mode, shape);
  task.stimuli.reserve(static_cast<std::size_t>(shape.total()));
  Rng order(derive_seed(seed, kOrderStream));
  for (int b = 0; b < shape.blocks; ++b) {
    const std::size_t block_start = task.stimuli.size();
    for (int i = 0; i < shape.reals_per_block(); ++i) {
      const ImageRecord* r = reals[static_cast<std::size_t>(b * shape.reals_per_block() + i)];
      task.stimuli.push_back({r->image_id, Label::kReal, b});
    }
    for (int i = 0; i < shape.fakes_per_block; ++i) {
      const ImageRecord* r = fakes[static_cast<std::size_t>(b * shape.fakes_per_block + i)];
      task.stimuli.push_back({r->image_id, Label::kFake, b});
    }
    order.shuffle(std::span(task.stimuli).subspan(block_start));
  }
  return task;
}

RunAssignments::RunAssignments(std::string run_id, uint64_t run_seed, SessionMode mode,
                               TaskShape shape)
    : run_id_(std::move(run_id)), run_seed_(run_seed), mode_(mode), shape_(shape) {}

TaskAssignment RunAssignments::assign(const ImagePool& pool, const std::string& evaluator_id,
                                      bool qualified, const std::set<std::string>& exclude) {
  if (mode_ != SessionMode::kQualification && !qualified) {
    fail(ErrorKind::kAuthorization, "evaluator " + evaluator_id + " has not qualified");
  }
  std::lock_guard lock(mu_);
  if (assigned_.contains(evaluator_id)) {
    fail(ErrorKind::kBetweenSubjects,
         "evaluator " + evaluator_id + " already assigned to run " + run_id_);
  }
  TaskAssignment task =
      make_assignment(pool, run_id_, evaluator_id, mode_, shape_, run_seed_, exclude);
  assigned_.insert(evaluator_id);
  return task;
}

bool RunAssignments::contains(const std::string& evaluator_id) const {
  std::lock_guard lock(mu_);
  return assigned_.contains(evaluator_id);
}

std::size_t RunAssignments::assigned_count() const {
  std::lock_guard lock(mu_);
  return assigned_.size();
}

std::vector<int> qualification_fake_split(int total_fakes, std::size_t n_models,
                                          uint64_t seed) {
  if (n_models == 0) fail(ErrorKind::kInput, "no fake models for qualification");
  const int base = total_fakes / static_cast<int>(n_models);
  const auto remainder = static_cast<std::size_t>(total_fakes % static_cast<int>(n_models));
  std::vector<int> split(n_models, base);
  for (std::size_t i : sample_without_replacement(n_models, remainder, seed)) ++split[i];
  return split;
}

TaskAssignment build_qualification(std::span<const ImagePool> pools, uint64_t seed,
                                   const std::string& evaluator_id, bool allow_single_model,
                                   TaskShape shape) {
  std::vector<ImageRecord> reals;
  std::set<std::string> seen_reals;
  std::map<std::string, std::vector<ImageRecord>> fakes_by_model;
  for (const ImagePool& pool : pools) {
    for (const ImageRecord& r : pool.real_images) {
      if (seen_reals.insert(r.image_id).second) reals.push_back(r);
    }
    for (const ImageRecord& r : pool.fake_images) {
      fakes_by_model[r.model_id.value_or("")].push_back(r);
    }
  }
  if (fakes_by_model.empty()) fail(ErrorKind::kInput, "qualification needs fake images");
  if (fakes_by_model.size() < 2 && !allow_single_model) {
    fail(ErrorKind::kInput,
         "qualification fakes should come from at least two models; pass "
         "allow_single_model to override");
  }
  const uint64_t evaluator_seed = derive_seed(seed, hash_id(evaluator_id));
  const int total_fakes = shape.fakes_per_block * shape.blocks;
  const int total_reals = shape.reals_per_block() * shape.blocks;
  const std::vector<int> split = qualification_fake_split(
      total_fakes, fakes_by_model.size(), derive_seed(seed, kRemainderStream));

  TaskAssignment task;
  task.run_id = "qualification";
  task.evaluator_id = evaluator_id;
  task.mode = SessionMode::kQualification;
  task.shape = {1, shape.total(), total_fakes};
  task.disclosure = disclosure_text(SessionMode::kQualification, task.shape);

  std::vector<const ImageRecord*> real_ptrs;
  for (const ImageRecord& r : reals) real_ptrs.push_back(&r);
  for (const ImageRecord* r : draw(real_ptrs, static_cast<std::size_t>(total_reals),
                                   derive_seed(evaluator_seed, kRealStream), "real")) {
    task.stimuli.push_back({r->image_id, Label::kReal, 0});
  }
  std::size_t model_index = 0;
  for (const auto& [model, images] : fakes_by_model) {
    std::vector<const ImageRecord*> ptrs;
    for (const ImageRecord& r : images) ptrs.push_back(&r);
    const uint64_t model_seed = derive_seed(derive_seed(evaluator_seed, kFakeStream), model_index);
    for (const ImageRecord* r :
         draw(ptrs, static_cast<std::size_t>(split[model_index]), model_seed, "fake")) {
      task.stimuli.push_back({r->image_id, Label::kFake, 0});
    }
    ++model_index;
  }
  Rng order(derive_seed(evaluator_seed, kOrderStream));
  order.shuffle(std::span(task.stimuli));
  return task;
}

bool QualificationRule::passes(int real_correct, int n_real, int fake_correct,
                               int n_fake) const {
  // Compare counts against threshold * n to avoid 0.66 vs 0.65 rounding noise.
  auto at_least = [this](int correct, int n) {
    return n > 0 && static_cast<double>(correct) >= threshold * n - 1e-9;
  };
  if (require_both_classes) return at_least(real_correct, n_real) && at_least(fake_correct, n_fake);
  return at_least(real_correct + fake_correct, n_real + n_fake);
}

QualificationResult grade_qualification(std::span<const Judgment> judgments,
                                        const QualificationRule& rule) {
  if (judgments.empty()) fail(ErrorKind::kState, "qualification session has no judgments");
  int n_real = 0, n_fake = 0, real_correct = 0, fake_correct = 0;
  for (const Judgment& j : judgments) {
    if (j.evaluator_id != judgments.front().evaluator_id) {
      fail(ErrorKind::kInput, "qualification judgments from more than one evaluator");
    }
    if (j.truth == Label::kReal) {
      ++n_real;
      if (j.correct()) ++real_correct;
    } else {
      ++n_fake;
      if (j.correct()) ++fake_correct;
    }
  }
  if (n_real != rule.expected_reals || n_fake != rule.expected_fakes) {
    fail(ErrorKind::kState, "qualification session incomplete: " + std::to_string(n_real) +
                                " reals and " + std::to_string(n_fake) + " fakes judged");
  }
  QualificationResult result;
  result.evaluator_id = judgments.front().evaluator_id;
  result.real_accuracy = static_cast<double>(real_correct) / n_real;
  result.fake_accuracy = static_cast<double>(fake_correct) / n_fake;
  result.threshold = rule.threshold;
  result.passed = rule.passes(real_correct, n_real, fake_correct, n_fake);
  return result;
}

std::string Usd::str() const {
  char buf[32];
  const int64_t whole = cents / 100;
  const int64_t frac = cents % 100;
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", cents < 0 ? "-" : "",
                static_cast<long long>(whole < 0 ? -whole : whole),
                static_cast<long long>(frac < 0 ? -frac : frac));
  return buf;
}

Usd running_bonus(int correct_answers, const PaymentRates& rates) {
  return {rates.bonus_per_correct.cents * correct_answers};
}

PaymentStatement compute_payment(const std::string& evaluator_id, bool qualified,
                                 std::span<const Judgment> judgments,
                                 const PaymentRates& rates) {
  int correct = 0;
  for (const Judgment& j : judgments) {
    if (j.evaluator_id != evaluator_id) {
      fail(ErrorKind::kInput, "judgment from " + j.evaluator_id + " in statement for " +
                                  evaluator_id);
    }
    if (j.correct()) ++correct;
  }
  PaymentStatement statement;
  statement.evaluator_id = evaluator_id;
  statement.base = qualified ? rates.base : Usd{0};
  statement.bonus = running_bonus(correct, rates);
  statement.total = statement.base + statement.bonus;
  return statement;
}

}  // namespace hype
