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

// Model scores from raw judgments.
//
// Infinity mode scores a model by the mean per-evaluator error rate (in
// percent) on a balanced real/fake set; 50% is chance and anything above
// means fakes pass as real more often than reals do. Time mode scores a
// model by the mean per-evaluator staircase threshold in milliseconds.
// Both average per evaluator first so that the bootstrap can resample
// evaluators.

#ifndef HYPE_SCORING_HPP_
#define HYPE_SCORING_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hype/judgment.hpp"
#include "hype/staircase.hpp"
#include "hype/stats.hpp"
#include "json.hpp"

namespace hype {

struct EvaluatorScore {
  std::string evaluator_id;
  // Fraction of fakes answered "real"; absent when no fakes were shown.
  std::optional<double> fake_error;
  // Fraction of reals answered "fake"; absent when no reals were shown.
  std::optional<double> real_error;
  double combined_error = 0.0;
  int fake_count = 0;
  int real_count = 0;

  bool partial() const { return !fake_error || !real_error; }
};

enum class ScoreMode { kTime, kInfinity };

std::string_view to_string(ScoreMode mode);
ScoreMode parse_score_mode(std::string_view text);

struct ModelScoreReport {
  std::string model_id;
  ScoreMode mode = ScoreMode::kInfinity;
  double score = 0.0;                      // percent or milliseconds
  std::optional<double> fake_error_mean;   // percent, infinity mode only
  std::optional<double> real_error_mean;   // percent, infinity mode only
  double std = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_evaluators = 0;
  int incomplete_sessions = 0;
  bool partial = false;
  std::optional<int> rank;

  bool operator==(const ModelScoreReport&) const = default;
};

EvaluatorScore evaluator_error_rates(std::span<const Judgment> judgments);

// Score fields only; std and CI stay zero until with_bootstrap().
ModelScoreReport hype_infinity(std::span<const EvaluatorScore> per_evaluator,
                               std::string model_id);
ModelScoreReport hype_time(std::span<const SessionThreshold> thresholds,
                           std::string model_id);

// Per-evaluator values in report units, the input to bootstrap_ci.
std::vector<double> infinity_samples(std::span<const EvaluatorScore> scores);
std::vector<double> time_samples(std::span<const SessionThreshold> thresholds);

ModelScoreReport with_bootstrap(ModelScoreReport report,
                                const BootstrapResult& bootstrap);

// Rank 1 is the highest score; equal scores share the better rank.
void assign_ranks(std::span<ModelScoreReport> reports);

// Mean of `values` summed in sorted order, so the result does not depend on
// input order down to the last bit.
double order_independent_mean(std::span<const double> values);

nlohmann::json to_json(const ModelScoreReport& report);
ModelScoreReport report_from_json(const nlohmann::json& j);

// One table row rounded to one decimal:
// rank, model, score, fake error, real error, std, CI, n.
std::string format_report_row(const ModelScoreReport& report);
std::string report_table_header(ScoreMode mode);

}  // namespace hype

#endif  // HYPE_SCORING_HPP_
