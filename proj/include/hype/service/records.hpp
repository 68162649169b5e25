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

// Persistent records of the evaluation service: run manifests, session
// assignments, response log entries and external metric tables.

#ifndef HYPE_SERVICE_RECORDS_HPP_
#define HYPE_SERVICE_RECORDS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hype/judgment.hpp"
#include "hype/staircase.hpp"
#include "hype/stats.hpp"
#include "hype/tasks.hpp"
#include "json.hpp"

namespace hype::service {

// Pseudo run id under which qualification sessions are logged.
inline constexpr std::string_view kQualificationRunId = "qualification";

enum class RunStatus { kOpen, kCollecting, kComplete };

std::string_view to_string(RunStatus status);
RunStatus parse_run_status(std::string_view text);

nlohmann::json to_json(const StaircaseConfig& config);
// Keys as produced by to_json; all required.
StaircaseConfig staircase_config_from_json(const nlohmann::json& j);

struct RunSeeds {
  uint64_t assignment = 0;
  uint64_t bootstrap = 0;
  uint64_t masks = 0;
  bool operator==(const RunSeeds&) const = default;
};

struct RunManifest {
  std::string run_id;
  std::string model_id;
  std::string dataset_id;
  SessionMode mode = SessionMode::kInfinity;  // kTime or kInfinity
  std::string pool_id;
  int target_evaluators = 30;
  RunSeeds seeds;
  RunStatus status = RunStatus::kOpen;
  int64_t created_at_ms = 0;
  StaircaseConfig staircase;
  // Bootstrap sizes used when scoring; the seed is seeds.bootstrap.
  std::size_t bootstrap_resample_size = kDefaultResampleSize;
  std::size_t bootstrap_iterations = kDefaultBootstrapIterations;

  TaskShape shape() const;
  // Throws Error(kValidation).
  void validate() const;
  bool operator==(const RunManifest&) const = default;
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest run_manifest_from_json(const nlohmann::json& j);

// Throws Error(kState) when `to` is not after `from`.
void check_status_transition(RunStatus from, RunStatus to);

// Assignment of one session, written when the session starts. Holds truth
// labels and never leaves the server.
struct SessionRecord {
  std::string session_id;
  std::string run_id;
  std::string evaluator_id;
  SessionMode mode = SessionMode::kInfinity;
  TaskShape shape;
  std::vector<Stimulus> stimuli;
  std::string disclosure;
  int64_t created_at_ms = 0;
  bool operator==(const SessionRecord&) const = default;
};

nlohmann::json to_json(const SessionRecord& record);
SessionRecord session_record_from_json(const nlohmann::json& j);

// One line of the response log.
struct ResponseLogEntry {
  uint64_t log_index = 0;  // global, consecutive from 0
  std::string run_id;
  std::string session_id;
  int sequence = 0;  // per session, consecutive from 0
  SessionMode mode = SessionMode::kInfinity;
  Judgment judgment;  // submitted_at_ms is the server receive time
  bool timing_flagged = false;
  bool operator==(const ResponseLogEntry&) const = default;
};

nlohmann::json to_json(const ResponseLogEntry& entry);
// Throws Error(kInput) on missing or mistyped fields.
ResponseLogEntry log_entry_from_json(const nlohmann::json& j);

struct MetricRow {
  std::string model_id;
  std::string metric;
  double value = 0.0;
  bool operator==(const MetricRow&) const = default;
};

// External per-model metrics (FID, KID, precision, ...) keyed by
// (model_id, metric). CSV form: header "model_id,metric,value".
class MetricTable {
 public:
  // Throws Error(kValidation) on a malformed row or a repeated pair.
  static MetricTable parse_csv(std::string_view text);

  // Rows of `other` replace rows with the same key.
  void merge(const MetricTable& other);
  std::optional<double> lookup(std::string_view model_id, std::string_view metric) const;
  // Distinct metric names in first-seen order.
  std::vector<std::string> metrics() const;
  const std::vector<MetricRow>& rows() const { return rows_; }
  std::string to_csv() const;

 private:
  std::vector<MetricRow> rows_;
};

}  // namespace hype::service

#endif  // HYPE_SERVICE_RECORDS_HPP_
