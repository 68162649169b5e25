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

#include "hype/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "hype/error.hpp"
#include "hype/scoring.hpp"

namespace hype {
namespace {

constexpr uint64_t kBootstrapStream = 0xb0075ull;

nlohmann::json staircase_json(const StaircaseConfig& c) {
  return {{"start_exposure_ms", c.start_exposure.count()},
          {"min_exposure_ms", c.min_exposure.count()},
          {"max_exposure_ms", c.max_exposure.count()},
          {"step_down_on_correct_ms", c.step_down_on_correct.count()},
          {"step_up_on_incorrect_ms", c.step_up_on_incorrect.count()},
          {"trials_per_block", c.trials_per_block},
          {"blocks_per_session", c.blocks_per_session}};
}

nlohmann::json psychometric_json(const PsychometricModel& m) {
  return {{"guess_rate", m.guess_rate},
          {"lapse_rate", m.lapse_rate},
          {"threshold_t75_ms", m.threshold_t75},
          {"slope", m.slope}};
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

void PsychometricModel::validate() const {
  if (!(guess_rate >= 0.0 && guess_rate < 1.0)) fail(ErrorKind::kInput, "guess_rate must be in [0, 1)");
  if (!(lapse_rate >= 0.0 && lapse_rate <= 0.5)) fail(ErrorKind::kInput, "lapse_rate must be in [0, 0.5]");
  if (guess_rate + lapse_rate > 1.0) fail(ErrorKind::kInput, "guess_rate + lapse_rate must be <= 1");
  if (!(threshold_t75 > 0.0) || !std::isfinite(threshold_t75)) {
    fail(ErrorKind::kInput, "threshold_t75 must be positive");
  }
  if (!(slope > 0.0) || !std::isfinite(slope)) fail(ErrorKind::kInput, "slope must be positive");
}

double PsychometricModel::log_midpoint() const {
  const double span = 1.0 - guess_rate - lapse_rate;
  const double r = (0.75 - guess_rate) / span;
  // 0.75 outside the curve's range: fall back to centering on t75.
  if (!(r > 0.0 && r < 1.0)) return std::log(threshold_t75);
  return std::log(threshold_t75) - std::log(r / (1.0 - r)) / slope;
}

double p_correct(const PsychometricModel& model, double exposure_ms) {
  if (exposure_ms <= 0.0) return model.guess_rate;
  const double z = model.slope * (std::log(exposure_ms) - model.log_midpoint());
  const double logistic = 1.0 / (1.0 + std::exp(-z));
  return model.guess_rate + (1.0 - model.guess_rate - model.lapse_rate) * logistic;
}

void InfinityBehaviorModel::validate() const {
  if (!(p_fooled_by_fake >= 0.0 && p_fooled_by_fake <= 1.0) ||
      !(p_misjudge_real >= 0.0 && p_misjudge_real <= 1.0)) {
    fail(ErrorKind::kInput, "error probabilities must be in [0, 1]");
  }
}

Label InfinityBehaviorModel::respond(Label truth, Rng& rng) const {
  const double p_wrong = truth == Label::kFake ? p_fooled_by_fake : p_misjudge_real;
  return rng.bernoulli(p_wrong) ? opposite(truth) : truth;
}

TimeSessionOutcome simulate_time_session(const PsychometricModel& model,
                                         const StaircaseConfig& config, uint64_t seed,
                                         std::string evaluator_id) {
  model.validate();
  Rng rng(seed);
  SessionStaircase staircase(config);
  while (!staircase.finished()) {
    const double p = p_correct(model, static_cast<double>(staircase.commanded_exposure().count()));
    staircase.record(rng.bernoulli(p));
  }
  return {staircase.threshold(std::move(evaluator_id)), staircase.completed_blocks()};
}

std::vector<Judgment> simulate_infinity_session(const InfinityBehaviorModel& model,
                                                const InfinityShape& shape, uint64_t seed,
                                                std::string evaluator_id) {
  model.validate();
  if (shape.reals < 0 || shape.fakes < 0) fail(ErrorKind::kInput, "negative class count");
  Rng rng(seed);
  std::vector<Judgment> out;
  out.reserve(static_cast<std::size_t>(shape.reals + shape.fakes));
  char id[32];
  for (int i = 0; i < shape.reals; ++i) {
    std::snprintf(id, sizeof id, "real-%04d", i);
    out.push_back({evaluator_id, id, Label::kReal, Label::kReal, std::nullopt, 0, std::nullopt});
  }
  for (int i = 0; i < shape.fakes; ++i) {
    std::snprintf(id, sizeof id, "fake-%04d", i);
    out.push_back({evaluator_id, id, Label::kFake, Label::kFake, std::nullopt, 0, std::nullopt});
  }
  rng.shuffle(std::span(out));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].answer = model.respond(out[i].truth, rng);
    out[i].submitted_at_ms = static_cast<int64_t>(i);
  }
  return out;
}

void write_jsonl(std::ostream& out, const ExperimentReport& report) {
  out << nlohmann::json{{"record", "header"},
                        {"experiment", report.experiment},
                        {"seed", report.seed},
                        {"config", report.config}}
             .dump()
      << '\n';
  for (const auto& e : report.per_evaluator) {
    nlohmann::json line = e;
    line["record"] = "evaluator";
    out << line.dump() << '\n';
  }
  for (const auto& p : report.curve) {
    out << nlohmann::json{{"record", "curve"}, {"n", p.n}, {"mean", p.mean}, {"std", p.std},
                          {"ci_low", p.ci_low}, {"ci_high", p.ci_high}, {"width", p.width()}}
               .dump()
        << '\n';
  }
  out << nlohmann::json{{"record", "summary"}, {"values", report.summary}}.dump() << '\n';
}

ExperimentReport run_time_experiment(const TimeExperimentConfig& config, uint64_t seed) {
  if (config.evaluators <= 0) fail(ErrorKind::kInput, "evaluators must be positive");
  config.staircase.validate();
  ExperimentReport report;
  report.experiment = "time";
  report.seed = seed;
  report.config = {{"model", psychometric_json(config.model)},
                   {"staircase", staircase_json(config.staircase)},
                   {"evaluators", config.evaluators}};
  std::vector<double> thresholds;
  int at_floor = 0;
  for (int i = 0; i < config.evaluators; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "sim-%04d", i);
    const TimeSessionOutcome outcome = simulate_time_session(
        config.model, config.staircase, derive_seed(seed, static_cast<uint64_t>(i)), id);
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& b : outcome.blocks) modes.push_back(b.modal_exposure.count());
    report.per_evaluator.push_back({{"evaluator_id", outcome.threshold.evaluator_id},
                                    {"threshold_ms", outcome.threshold.threshold_ms},
                                    {"block_modes_ms", modes}});
    thresholds.push_back(outcome.threshold.threshold_ms);
    if (outcome.threshold.threshold_ms <=
        static_cast<double>(config.staircase.min_exposure.count())) {
      ++at_floor;
    }
  }
  const auto [lo, hi] = std::minmax_element(thresholds.begin(), thresholds.end());
  report.summary["mean_threshold_ms"] = order_independent_mean(thresholds);
  report.summary["sd_threshold_ms"] = sample_sd(thresholds);
  report.summary["min_threshold_ms"] = *lo;
  report.summary["max_threshold_ms"] = *hi;
  report.summary["fraction_at_floor"] =
      static_cast<double>(at_floor) / static_cast<double>(config.evaluators);
  return report;
}

std::vector<double> simulate_infinity_pool(const InfinityBehaviorModel& model,
                                           const InfinityShape& shape, int evaluators,
                                           uint64_t seed) {
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(std::max(evaluators, 0)));
  for (int i = 0; i < evaluators; ++i) {
    const auto judgments =
        simulate_infinity_session(model, shape, derive_seed(seed, static_cast<uint64_t>(i)));
    scores.push_back(100.0 * evaluator_error_rates(judgments).combined_error);
  }
  return scores;
}

ExperimentReport run_infinity_experiment(const InfinityExperimentConfig& config,
                                         uint64_t seed) {
  if (config.evaluators <= 0) fail(ErrorKind::kInput, "evaluators must be positive");
  ExperimentReport report;
  report.experiment = "infinity";
  report.seed = seed;
  report.config = {{"p_fooled_by_fake", config.model.p_fooled_by_fake},
                   {"p_misjudge_real", config.model.p_misjudge_real},
                   {"reals", config.shape.reals},
                   {"fakes", config.shape.fakes},
                   {"evaluators", config.evaluators},
                   {"bootstrap_resample_size", config.bootstrap.resample_size},
                   {"bootstrap_iterations", config.bootstrap.iterations}};
  std::vector<EvaluatorScore> scores;
  for (int i = 0; i < config.evaluators; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "sim-%04d", i);
    const auto judgments = simulate_infinity_session(
        config.model, config.shape, derive_seed(seed, static_cast<uint64_t>(i)), id);
    EvaluatorScore s = evaluator_error_rates(judgments);
    nlohmann::json row = {{"evaluator_id", s.evaluator_id},
                          {"combined_error", s.combined_error}};
    if (s.fake_error) row["fake_error"] = *s.fake_error;
    if (s.real_error) row["real_error"] = *s.real_error;
    report.per_evaluator.push_back(std::move(row));
    scores.push_back(std::move(s));
  }
  BootstrapOptions options = config.bootstrap;
  options.seed = derive_seed(seed, kBootstrapStream);
  const std::vector<double> samples = infinity_samples(scores);
  const ModelScoreReport score =
      with_bootstrap(hype_infinity(scores, "simulated"), bootstrap_ci(samples, options));
  report.summary["score"] = score.score;
  if (score.fake_error_mean) report.summary["fake_error"] = *score.fake_error_mean;
  if (score.real_error_mean) report.summary["real_error"] = *score.real_error_mean;
  report.summary["std"] = score.std;
  report.summary["ci_low"] = score.ci_low;
  report.summary["ci_high"] = score.ci_high;
  return report;
}

ExperimentReport run_cost_tradeoff_experiment(const TradeoffConfig& config, uint64_t seed) {
  if (config.pool_scores.size() < 2) fail(ErrorKind::kInput, "need at least two pool scores");
  if (config.n_grid.empty()) fail(ErrorKind::kInput, "empty evaluator-count grid");
  ExperimentReport report;
  report.experiment = "tradeoff";
  report.seed = seed;
  report.config = {{"pool_size", config.pool_scores.size()},
                   {"n_grid", config.n_grid},
                   {"iterations", config.iterations}};
  for (int n : config.n_grid) {
    if (n <= 0) fail(ErrorKind::kInput, "grid sizes must be positive");
    BootstrapOptions options;
    options.resample_size = static_cast<std::size_t>(n);
    options.iterations = config.iterations;
    options.seed = derive_seed(seed, static_cast<uint64_t>(n));
    const BootstrapResult r = bootstrap_ci(config.pool_scores, options);
    report.curve.push_back({n, r.mean, r.std, r.ci_low, r.ci_high});
  }
  const CurvePoint& first = report.curve.front();
  for (const CurvePoint& p : report.curve) {
    const std::string suffix = std::to_string(p.n);
    report.summary["width_ratio_" + suffix] = p.width() > 0.0 ? first.width() / p.width() : 0.0;
    report.summary["std_ratio_" + suffix] = p.std > 0.0 ? first.std / p.std : 0.0;
  }
  return report;
}

ExperimentReport run_convergence_experiment(const ConvergenceConfig& config, uint64_t seed) {
  if (!(config.responder_p >= 0.0 && config.responder_p <= 1.0)) {
    fail(ErrorKind::kInput, "responder_p must be in [0, 1]");
  }
  if (config.blocks <= 0) fail(ErrorKind::kInput, "blocks must be positive");
  StaircaseConfig sc = config.staircase;
  sc.step_down_on_correct = config.step_down;
  sc.step_up_on_incorrect = config.step_up;
  sc.validate();

  ExperimentReport report;
  report.experiment = "convergence";
  report.seed = seed;
  report.config = {{"responder_p", config.responder_p},
                   {"blocks", config.blocks},
                   {"staircase", staircase_json(sc)}};

  const double down = static_cast<double>(sc.step_down_on_correct.count());
  const double up = static_cast<double>(sc.step_up_on_incorrect.count());
  double drift_sum = 0.0;
  long long interior = 0;
  double final_sum = 0.0;
  double mode_sum = 0.0;
  double floor_sum = 0.0;
  for (int b = 0; b < config.blocks; ++b) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(b)));
    StaircaseState state = start_block(sc, 0);
    while (!state.complete()) {
      const milliseconds before = state.current_exposure;
      state = record_judgment(std::move(state), rng.bernoulli(config.responder_p));
      if (before - sc.step_down_on_correct >= sc.min_exposure &&
          before + sc.step_up_on_incorrect <= sc.max_exposure) {
        drift_sum += static_cast<double>((state.current_exposure - before).count());
        ++interior;
      }
    }
    const BlockResult result = block_mode(state);
    final_sum += static_cast<double>(state.current_exposure.count());
    mode_sum += static_cast<double>(result.modal_exposure.count());
    floor_sum += result.floor_fraction;
  }
  const double blocks = static_cast<double>(config.blocks);
  report.summary["expected_drift_per_trial"] =
      (1.0 - config.responder_p) * up - config.responder_p * down;
  report.summary["mean_drift_per_trial"] =
      interior > 0 ? drift_sum / static_cast<double>(interior) : 0.0;
  report.summary["interior_trials"] = static_cast<double>(interior);
  report.summary["mean_final_exposure_ms"] = final_sum / blocks;
  report.summary["mean_modal_exposure_ms"] = mode_sum / blocks;
  report.summary["mean_floor_fraction"] = floor_sum / blocks;
  report.summary["target_accuracy"] = sc.target_accuracy();
  return report;
}

}  // namespace hype
