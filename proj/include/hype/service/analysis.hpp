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

// Pure folds from (manifest, log entries) to reports. The live service and
// offline replay both call these, so their output is byte-identical.

#ifndef HYPE_SERVICE_ANALYSIS_HPP_
#define HYPE_SERVICE_ANALYSIS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hype/scoring.hpp"
#include "hype/service/records.hpp"
#include "hype/stats.hpp"
#include "json.hpp"

namespace hype::service {

struct ScoredRun {
  RunManifest manifest;
  ModelScoreReport report;
  // Per-evaluator values in report units, ordered by evaluator id.
  std::vector<double> samples;
  std::vector<std::string> evaluator_ids;
};

// Scores the completed sessions of `manifest.run_id` found in `entries`
// (entries of other runs are ignored). Time-mode thresholds are recomputed
// by replaying the correctness sequence through the staircase. The report
// is partial when fewer than target_evaluators sessions completed or when
// `log_truncated` is set. Bootstrap sizes and seed come from the manifest;
// `threads` only affects speed. Throws Error(kState) when no session is
// complete.
ScoredRun score_run(const RunManifest& manifest, std::span<const ResponseLogEntry> entries,
                    bool log_truncated = false, unsigned threads = 1);

struct MetricCorrelation {
  std::string metric;
  SpearmanResult spearman;
  std::vector<std::string> models;
};

struct ComparisonReport {
  std::vector<ModelScoreReport> models;  // ranked
  std::optional<AnovaResult> anova;
  std::optional<TukeyResult> tukey;
  std::optional<TTestResult> t_test;  // exactly two runs
  std::vector<MetricCorrelation> correlations;
  std::vector<std::string> warnings;
};

// ANOVA and Tukey across per-evaluator groups (when every run has at least
// two samples), and Spearman of scores against each metric in `metrics`
// over the models that have a value. Models missing a metric or appearing
// twice are skipped with a warning; fewer than three pairs skips the
// metric. Mixing time and infinity runs is a validation error.
ComparisonReport compare_models(std::span<const ScoredRun> runs, const MetricTable& metrics);

nlohmann::json to_json(const ComparisonReport& report);

}  // namespace hype::service

#endif  // HYPE_SERVICE_ANALYSIS_HPP_
