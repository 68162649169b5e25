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

#include "hype/scoring.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>

#include "hype/error.hpp"

namespace hype {

std::string_view to_string(Label label) {
  return label == Label::kReal ? "real" : "fake";
}

std::string_view to_string(SessionMode mode) {
  switch (mode) {
    case SessionMode::kTime: return "time";
    case SessionMode::kInfinity: return "infinity";
    case SessionMode::kQualification: return "qualification";
  }
  return "unknown";
}

Label parse_label(std::string_view text) {
  if (text == "real") return Label::kReal;
  if (text == "fake") return Label::kFake;
  fail(ErrorKind::kInput, "unknown label '" + std::string(text) + "'");
}

SessionMode parse_session_mode(std::string_view text) {
  if (text == "time") return SessionMode::kTime;
  if (text == "infinity") return SessionMode::kInfinity;
  if (text == "qualification") return SessionMode::kQualification;
  fail(ErrorKind::kInput, "unknown session mode '" + std::string(text) + "'");
}

std::string_view to_string(ScoreMode mode) {
  return mode == ScoreMode::kTime ? "time" : "infinity";
}

ScoreMode parse_score_mode(std::string_view text) {
  if (text == "time") return ScoreMode::kTime;
  if (text == "infinity") return ScoreMode::kInfinity;
  fail(ErrorKind::kInput, "unknown score mode '" + std::string(text) + "'");
}

double order_independent_mean(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::kInput, "mean of empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  return sum / static_cast<double>(sorted.size());
}

EvaluatorScore evaluator_error_rates(std::span<const Judgment> judgments) {
  if (judgments.empty()) fail(ErrorKind::kInput, "no judgments for evaluator");
  EvaluatorScore score;
  score.evaluator_id = judgments.front().evaluator_id;
  int fake_mistakes = 0;
  int real_mistakes = 0;
  for (const Judgment& j : judgments) {
    if (j.evaluator_id != score.evaluator_id) {
      fail(ErrorKind::kInput, "judgments from more than one evaluator");
    }
    if (j.truth == Label::kFake) {
      ++score.fake_count;
      if (!j.correct()) ++fake_mistakes;
    } else {
      ++score.real_count;
      if (!j.correct()) ++real_mistakes;
    }
  }
  if (score.fake_count > 0) {
    score.fake_error = static_cast<double>(fake_mistakes) / score.fake_count;
  }
  if (score.real_count > 0) {
    score.real_error = static_cast<double>(real_mistakes) / score.real_count;
  }
  score.combined_error = static_cast<double>(fake_mistakes + real_mistakes) /
                         static_cast<double>(judgments.size());
  return score;
}

std::vector<double> infinity_samples(std::span<const EvaluatorScore> scores) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const EvaluatorScore& s : scores) out.push_back(100.0 * s.combined_error);
  return out;
}

std::vector<double> time_samples(std::span<const SessionThreshold> thresholds) {
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (const SessionThreshold& t : thresholds) out.push_back(t.threshold_ms);
  return out;
}

ModelScoreReport hype_infinity(std::span<const EvaluatorScore> per_evaluator,
                               std::string model_id) {
  if (per_evaluator.empty()) fail(ErrorKind::kInput, "no evaluator scores");
  ModelScoreReport report;
  report.model_id = std::move(model_id);
  report.mode = ScoreMode::kInfinity;
  report.n_evaluators = static_cast<int>(per_evaluator.size());
  report.score = order_independent_mean(infinity_samples(per_evaluator));

  std::vector<double> fakes;
  std::vector<double> reals;
  for (const EvaluatorScore& s : per_evaluator) {
    if (s.fake_error) fakes.push_back(100.0 * *s.fake_error);
    if (s.real_error) reals.push_back(100.0 * *s.real_error);
  }
  if (!fakes.empty()) report.fake_error_mean = order_independent_mean(fakes);
  if (!reals.empty()) report.real_error_mean = order_independent_mean(reals);
  report.ci_low = report.ci_high = report.score;
  return report;
}

ModelScoreReport hype_time(std::span<const SessionThreshold> thresholds,
                           std::string model_id) {
  if (thresholds.empty()) fail(ErrorKind::kInput, "no evaluator thresholds");
  ModelScoreReport report;
  report.model_id = std::move(model_id);
  report.mode = ScoreMode::kTime;
  report.n_evaluators = static_cast<int>(thresholds.size());
  report.score = order_independent_mean(time_samples(thresholds));
  report.ci_low = report.ci_high = report.score;
  return report;
}

ModelScoreReport with_bootstrap(ModelScoreReport report,
                                const BootstrapResult& bootstrap) {
  report.std = bootstrap.std;
  report.ci_low = bootstrap.ci_low;
  report.ci_high = bootstrap.ci_high;
  return report;
}

void assign_ranks(std::span<ModelScoreReport> reports) {
  std::vector<ModelScoreReport*> order;
  for (auto& r : reports) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->score > b->score; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && order[i]->score == order[i - 1]->score) {
      order[i]->rank = order[i - 1]->rank;
    } else {
      order[i]->rank = static_cast<int>(i) + 1;
    }
  }
}

nlohmann::json to_json(const ModelScoreReport& report) {
  nlohmann::json j;
  j["model_id"] = report.model_id;
  j["mode"] = to_string(report.mode);
  j["score"] = report.score;
  j["fake_error_mean"] = report.fake_error_mean
                             ? nlohmann::json(*report.fake_error_mean)
                             : nlohmann::json(nullptr);
  j["real_error_mean"] = report.real_error_mean
                             ? nlohmann::json(*report.real_error_mean)
                             : nlohmann::json(nullptr);
  j["std"] = report.std;
  j["ci_low"] = report.ci_low;
  j["ci_high"] = report.ci_high;
  j["n_evaluators"] = report.n_evaluators;
  j["incomplete_sessions"] = report.incomplete_sessions;
  j["partial"] = report.partial;
  j["rank"] = report.rank ? nlohmann::json(*report.rank) : nlohmann::json(nullptr);
  return j;
}

ModelScoreReport report_from_json(const nlohmann::json& j) {
  ModelScoreReport r;
  try {
    r.model_id = j.at("model_id").get<std::string>();
    r.mode = parse_score_mode(j.at("mode").get<std::string>());
    r.score = j.at("score").get<double>();
    if (!j.at("fake_error_mean").is_null()) r.fake_error_mean = j["fake_error_mean"].get<double>();
    if (!j.at("real_error_mean").is_null()) r.real_error_mean = j["real_error_mean"].get<double>();
    r.std = j.at("std").get<double>();
    r.ci_low = j.at("ci_low").get<double>();
    r.ci_high = j.at("ci_high").get<double>();
    r.n_evaluators = j.at("n_evaluators").get<int>();
    r.incomplete_sessions = j.value("incomplete_sessions", 0);
    r.partial = j.value("partial", false);
    if (j.contains("rank") && !j["rank"].is_null()) r.rank = j["rank"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInput, std::string("malformed score report: ") + e.what());
  }
  return r;
}

std::string report_table_header(ScoreMode mode) {
  if (mode == ScoreMode::kTime) {
    return "Rank  Model                     HYPE_time(ms)   Std.   95% CI            n";
  }
  return "Rank  Model                     HYPE_inf(%)  Fakes   Reals   Std.   95% CI          n";
}

std::string format_report_row(const ModelScoreReport& r) {
  char buf[256];
  const std::string rank = r.rank ? std::to_string(*r.rank) : "-";
  if (r.mode == ScoreMode::kTime) {
    std::snprintf(buf, sizeof buf, "%-5s %-25s %13.1f %6.1f   %6.1f -- %-6.1f %3d%s",
                  rank.c_str(), r.model_id.c_str(), r.score, r.std, r.ci_low,
                  r.ci_high, r.n_evaluators, r.partial ? " (partial)" : "");
    return buf;
  }
  auto pct = [](const std::optional<double>& v) {
    char cell[32];
    if (v) {
      std::snprintf(cell, sizeof cell, "%5.1f%%", *v);
    } else {
      std::snprintf(cell, sizeof cell, "%6s", "n/a");
    }
    return std::string(cell);
  };
  std::snprintf(buf, sizeof buf, "%-5s %-25s %10.1f%%  %s  %s  %5.1f   %4.1f -- %-6.1f %3d%s",
                rank.c_str(), r.model_id.c_str(), r.score, pct(r.fake_error_mean).c_str(),
                pct(r.real_error_mean).c_str(), r.std, r.ci_low, r.ci_high,
                r.n_evaluators, r.partial ? " (partial)" : "");
  return buf;
}

}  // namespace hype
