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

// Simulated evaluators for exercising both protocols without people.
//
// Timed judgments follow a logistic psychometric function in log exposure,
//
//   p(e) = guess + (1 - guess - lapse) * logistic(slope * (ln e - ln m)),
//
// with the midpoint m solved so that p(t75) = 0.75. Untimed judgments are
// independent per-class Bernoulli mistakes.

#ifndef HYPE_SIMULATOR_HPP_
#define HYPE_SIMULATOR_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hype/judgment.hpp"
#include "hype/random.hpp"
#include "hype/staircase.hpp"
#include "hype/stats.hpp"
#include "json.hpp"

namespace hype {

struct PsychometricModel {
  double guess_rate = 0.5;
  double lapse_rate = 0.02;
  double threshold_t75 = 400.0;  // ms
  double slope = 6.0;

  // Throws Error(kInput). Lapse rates in [0.25, 0.5] are accepted but cap the
  // curve at or below 0.75, so t75 is then only nominal; at 0.5 the
  // evaluator is at chance for every exposure.
  void validate() const;
  // ln of the logistic midpoint.
  double log_midpoint() const;
};

double p_correct(const PsychometricModel& model, double exposure_ms);

struct InfinityBehaviorModel {
  double p_fooled_by_fake = 0.0;
  double p_misjudge_real = 0.0;

  void validate() const;
  Label respond(Label truth, Rng& rng) const;
};

struct TimeSessionOutcome {
  SessionThreshold threshold;
  std::vector<BlockResult> blocks;
};

TimeSessionOutcome simulate_time_session(const PsychometricModel& model,
                                         const StaircaseConfig& config, uint64_t seed,
                                         std::string evaluator_id = "sim");

struct InfinityShape {
  int reals = 50;
  int fakes = 50;
};

std::vector<Judgment> simulate_infinity_session(const InfinityBehaviorModel& model,
                                                const InfinityShape& shape, uint64_t seed,
                                                std::string evaluator_id = "sim");

struct CurvePoint {
  int n = 0;
  double mean = 0.0;
  double std = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double width() const { return ci_high - ci_low; }
};

// Output of every experiment, written as line-delimited JSON: one header
// record, then per-evaluator records, curve points and the summary.
struct ExperimentReport {
  std::string experiment;
  uint64_t seed = 0;
  nlohmann::json config;
  std::vector<nlohmann::json> per_evaluator;
  std::vector<CurvePoint> curve;
  std::map<std::string, double> summary;
};

void write_jsonl(std::ostream& out, const ExperimentReport& report);

struct TimeExperimentConfig {
  PsychometricModel model;
  StaircaseConfig staircase;
  int evaluators = 30;
};

ExperimentReport run_time_experiment(const TimeExperimentConfig& config, uint64_t seed);

struct InfinityExperimentConfig {
  InfinityBehaviorModel model;
  InfinityShape shape;
  int evaluators = 30;
  BootstrapOptions bootstrap;
};

ExperimentReport run_infinity_experiment(const InfinityExperimentConfig& config,
                                         uint64_t seed);

struct TradeoffConfig {
  std::vector<double> pool_scores;  // one score per evaluator, e.g. 120 of them
  std::vector<int> n_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  std::size_t iterations = kDefaultBootstrapIterations;
};

// Bootstrap CI at resample size n for every n in the grid. Summary carries
// width(n_first) / width(n) ratios as "width_ratio_<n>".
ExperimentReport run_cost_tradeoff_experiment(const TradeoffConfig& config, uint64_t seed);

// Scores for a simulated pool of infinity-mode evaluators, in percent.
std::vector<double> simulate_infinity_pool(const InfinityBehaviorModel& model,
                                           const InfinityShape& shape, int evaluators,
                                           uint64_t seed);

struct ConvergenceConfig {
  milliseconds step_down{10};
  milliseconds step_up{30};
  double responder_p = 0.75;
  int blocks = 10000;
  StaircaseConfig staircase;  // steps are overridden by the fields above
};

// Fixed-accuracy responders. "mean_drift_per_trial" averages the step taken
// on every trial whose position allowed both moves unclamped, an unbiased
// estimate of the expected per-trial drift.
ExperimentReport run_convergence_experiment(const ConvergenceConfig& config, uint64_t seed);

}  // namespace hype

#endif  // HYPE_SIMULATOR_HPP_
