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

#include "hype/service/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "hype/error.hpp"
#include "hype/staircase.hpp"

namespace hype::service {
namespace {

struct SessionJudgments {
  std::string evaluator_id;
  std::vector<const ResponseLogEntry*> entries;
};

SessionThreshold refold_staircase(const RunManifest& manifest, const SessionJudgments& s) {
  SessionStaircase staircase(manifest.staircase);
  for (const ResponseLogEntry* e : s.entries) {
    if (e->judgment.exposure_ms != staircase.commanded_exposure()) {
      fail(ErrorKind::kCorruption, "session " + e->session_id + " sequence " +
                                       std::to_string(e->sequence) +
                                       " disagrees with the staircase exposure");
    }
    staircase.record(e->judgment.correct());
  }
  return staircase.threshold(s.evaluator_id);
}

nlohmann::json spearman_json(const MetricCorrelation& c) {
  nlohmann::json j = {{"metric", c.metric}, {"n", c.spearman.n}, {"defined", c.spearman.defined},
                      {"models", c.models}};
  if (c.spearman.defined) {
    j["rho"] = c.spearman.rho;
    j["p_value"] = c.spearman.p_value;
  } else {
    j["rho"] = nullptr;
    j["p_value"] = nullptr;
  }
  return j;
}

}  // namespace

ScoredRun score_run(const RunManifest& manifest, std::span<const ResponseLogEntry> entries,
                    bool log_truncated, unsigned threads) {
  const TaskShape shape = manifest.shape();
  std::map<std::string, SessionJudgments> sessions;
  for (const ResponseLogEntry& e : entries) {
    if (e.run_id != manifest.run_id) continue;
    SessionJudgments& s = sessions[e.session_id];
    s.evaluator_id = e.judgment.evaluator_id;
    s.entries.push_back(&e);
  }

  std::vector<std::pair<std::string, const SessionJudgments*>> complete;
  int incomplete = 0;
  for (auto& [id, s] : sessions) {
    std::stable_sort(s.entries.begin(), s.entries.end(),
                     [](const auto* a, const auto* b) { return a->sequence < b->sequence; });
    if (static_cast<int>(s.entries.size()) == shape.total()) {
      complete.emplace_back(s.evaluator_id + '\n' + id, &s);
    } else {
      ++incomplete;
    }
  }
  if (complete.empty()) {
    fail(ErrorKind::kState, "run " + manifest.run_id + " has no completed sessions");
  }
  std::sort(complete.begin(), complete.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  ScoredRun out;
  out.manifest = manifest;
  if (manifest.mode == SessionMode::kTime) {
    std::vector<SessionThreshold> thresholds;
    for (const auto& [key, s] : complete) thresholds.push_back(refold_staircase(manifest, *s));
    out.report = hype_time(thresholds, manifest.model_id);
    out.samples = time_samples(thresholds);
  } else {
    std::vector<EvaluatorScore> scores;
    for (const auto& [key, s] : complete) {
      std::vector<Judgment> judgments;
      judgments.reserve(s->entries.size());
      for (const ResponseLogEntry* e : s->entries) judgments.push_back(e->judgment);
      scores.push_back(evaluator_error_rates(judgments));
    }
    out.report = hype_infinity(scores, manifest.model_id);
    out.samples = infinity_samples(scores);
  }
  for (const auto& [key, s] : complete) out.evaluator_ids.push_back(s->evaluator_id);

  BootstrapOptions options;
  options.resample_size = manifest.bootstrap_resample_size;
  options.iterations = manifest.bootstrap_iterations;
  options.seed = manifest.seeds.bootstrap;
  options.threads = threads;
  out.report = with_bootstrap(std::move(out.report), bootstrap_ci(out.samples, options));
  out.report.incomplete_sessions = incomplete;
  out.report.partial =
      log_truncated || static_cast<int>(complete.size()) < manifest.target_evaluators;
  return out;
}

ComparisonReport compare_models(std::span<const ScoredRun> runs, const MetricTable& metrics) {
  ComparisonReport out;
  if (runs.empty()) fail(ErrorKind::kInput, "no runs to compare");
  for (const ScoredRun& r : runs) {
    if (r.report.mode != runs.front().report.mode) {
      fail(ErrorKind::kValidation, "cannot compare time-mode and infinity-mode runs");
    }
    out.models.push_back(r.report);
  }
  assign_ranks(out.models);
  std::stable_sort(out.models.begin(), out.models.end(),
                   [](const ModelScoreReport& a, const ModelScoreReport& b) { return *a.rank < *b.rank; });

  if (runs.size() < 2) {
    out.warnings.push_back("separability needs at least two runs");
  } else {
    bool enough = true;
    std::vector<std::vector<double>> groups;
    for (const ScoredRun& r : runs) {
      if (r.samples.size() < 2) {
        enough = false;
        out.warnings.push_back("run " + r.manifest.run_id +
                               " has fewer than two evaluators; separability skipped");
      }
      groups.push_back(r.samples);
    }
    if (enough) {
      out.anova = one_way_anova(groups);
      out.tukey = tukey_hsd(groups);
      if (runs.size() == 2) out.t_test = t_test_unpaired(groups[0], groups[1]);
    }
  }

  std::map<std::string, int> model_counts;
  for (const ScoredRun& r : runs) ++model_counts[r.report.model_id];
  for (const auto& [model, count] : model_counts) {
    if (count > 1) {
      out.warnings.push_back("model " + model + " appears in " + std::to_string(count) +
                             " runs; skipped for correlations");
    }
  }
  for (const std::string& metric : metrics.metrics()) {
    MetricCorrelation c;
    c.metric = metric;
    std::vector<double> scores;
    std::vector<double> values;
    for (const ScoredRun& r : runs) {
      const std::string& model = r.report.model_id;
      if (model_counts[model] > 1) continue;
      const auto v = metrics.lookup(model, metric);
      if (!v) {
        out.warnings.push_back("model " + model + " has no " + metric + " value");
        continue;
      }
      c.models.push_back(model);
      scores.push_back(r.report.score);
      values.push_back(*v);
    }
    if (scores.size() < 3) {
      out.warnings.push_back("metric " + metric + " has fewer than three models; skipped");
      continue;
    }
    c.spearman = spearman(scores, values);
    if (!c.spearman.defined) {
      out.warnings.push_back("metric " + metric + " correlation undefined (constant input)");
    }
    out.correlations.push_back(std::move(c));
  }
  return out;
}

nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["models"] = nlohmann::json::array();
  for (const ModelScoreReport& m : r.models) j["models"].push_back(to_json(m));
  if (r.anova) {
    j["anova"] = {{"f_statistic", r.anova->f_statistic},
                  {"df_between", r.anova->df_between},
                  {"df_within", r.anova->df_within},
                  {"p_value", r.anova->p_value}};
  } else {
    j["anova"] = nullptr;
  }
  j["tukey"] = nlohmann::json::array();
  if (r.tukey) {
    for (const TukeyPair& p : r.tukey->pairs) {
      j["tukey"].push_back({{"model_a", r.models[p.group_a].model_id},
                            {"model_b", r.models[p.group_b].model_id},
                            {"mean_diff", p.mean_diff},
                            {"q_statistic", p.q_statistic},
                            {"p_value", p.p_value},
                            {"significant_at_05", p.significant_at_05}});
    }
  }
  if (r.t_test) {
    j["t_test"] = {{"t_statistic", r.t_test->t_statistic},
                   {"df", r.t_test->df},
                   {"p_value", r.t_test->p_value},
                   {"degenerate", r.t_test->degenerate}};
  } else {
    j["t_test"] = nullptr;
  }
  j["correlations"] = nlohmann::json::array();
  for (const MetricCorrelation& c : r.correlations) j["correlations"].push_back(spearman_json(c));
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace hype::service
