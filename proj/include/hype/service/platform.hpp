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

// Evaluation service core, independent of the transport. State lives under
// a data directory:
//
//   pools/<pool_id>.jsonl   pool manifests
//   runs/<run_id>.json      run manifests
//   sessions.jsonl          session assignments (server side only)
//   responses.jsonl         the response log
//   metrics.csv             ingested external metrics
//
// Everything except run status is rebuilt from these files on start-up.
// Per-session calls are serialized on a session lock; the response log is
// the only shared write point.

#ifndef HYPE_SERVICE_PLATFORM_HPP_
#define HYPE_SERVICE_PLATFORM_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hype/pool.hpp"
#include "hype/service/analysis.hpp"
#include "hype/service/config.hpp"
#include "hype/service/records.hpp"
#include "hype/service/response_log.hpp"
#include "json.hpp"

namespace hype::service {

// Milliseconds since the Unix epoch.
using Clock = std::function<int64_t()>;
Clock system_clock();

class Platform {
 public:
  explicit Platform(ServiceConfig config, Clock clock = system_clock());
  ~Platform();
  Platform(const Platform&) = delete;
  Platform& operator=(const Platform&) = delete;

  const ServiceConfig& config() const { return config_; }
  std::filesystem::path data_dir() const { return config_.server.data_dir; }
  std::filesystem::path log_path() const;

  // Stores a pool manifest. Throws Error(kConflict) if the id is taken.
  void put_pool(const ImagePool& pool);
  std::vector<std::string> pool_ids() const;

  // Draft keys: run_id, model_id, dataset_id, mode, pool_id and optionally
  // target_evaluators, seeds, staircase (partial) and bootstrap. Missing
  // seeds are derived from the service seed and the run id.
  RunManifest create_run(const nlohmann::json& draft);
  RunManifest run(const std::string& run_id) const;
  std::vector<RunManifest> runs() const;

  // Session descriptor: ids, mode, total, disclosure, next_sequence.
  nlohmann::json start_session(const std::string& run_id, const std::string& evaluator_id);
  nlohmann::json start_qualification(const std::string& evaluator_id);

  // Stimulus descriptor for the outstanding trial. `sequence`, when given,
  // must equal it. Repeated calls return the same descriptor.
  nlohmann::json next_stimulus(const std::string& session_id, std::optional<int> sequence);

  // Body: {sequence, answer, measured_exposure_ms?}. A sequence that was
  // already answered returns the stored reply without side effects.
  nlohmann::json submit_response(const std::string& session_id, const nlohmann::json& body);

  nlohmann::json session_status(const std::string& session_id);
  nlohmann::json evaluator_status(const std::string& evaluator_id);

  // Image bytes for an answered or outstanding trial.
  std::vector<unsigned char> stimulus_image(const std::string& session_id, int sequence);
  // PNG mask `index` (0-3) for a time-mode trial.
  std::vector<unsigned char> stimulus_mask(const std::string& session_id, int sequence,
                                           int index);

  ScoredRun score(const std::string& run_id) const;
  ComparisonReport compare(std::span<const std::string> run_ids) const;

  void ingest_metrics(std::string_view csv);
  MetricTable metrics() const;

 private:
  struct Session;
  struct PoolEntry;

  std::shared_ptr<Session> find_session(const std::string& session_id) const;
  std::shared_ptr<const PoolEntry> pool(const std::string& pool_id) const;
  std::vector<std::shared_ptr<const PoolEntry>> all_pools() const;
  std::shared_ptr<Session> register_session(SessionRecord record, bool persist);
  void apply_entry(Session& session, const ResponseLogEntry& entry);
  void on_session_complete(Session& session);
  void advance_run_status(const std::string& run_id);
  void write_manifest(const RunManifest& manifest) const;
  void recover();
  nlohmann::json session_descriptor(const Session& session) const;
  nlohmann::json build_reply(const Session& session, int sequence) const;
  void check_live(const Session& session) const;
  std::vector<unsigned char> image_bytes(const Session& session, int sequence) const;

  ServiceConfig config_;
  Clock clock_;

  // Registry of runs, sessions, evaluators. Never held while taking a
  // session lock.
  mutable std::mutex registry_mu_;
  std::map<std::string, RunManifest> runs_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::map<std::string, std::string>> run_sessions_;  // run -> evaluator -> session
  std::map<std::string, int> completed_per_run_;
  std::map<std::string, QualificationResult> qualification_results_;
  MetricTable metrics_;

  mutable std::mutex pool_mu_;
  mutable std::map<std::string, std::shared_ptr<const PoolEntry>> pools_;

  // Guards the writer and the in-memory copy of the log together so that
  // the copy is in log_index order.
  mutable std::mutex log_mu_;
  std::unique_ptr<ResponseLogWriter> writer_;
  std::vector<ResponseLogEntry> log_;
};

// Offline replay: scores every run found in `log` using manifests from
// `runs_dir`. Runs without completed sessions are skipped.
std::vector<ScoredRun> replay_scores(const std::filesystem::path& log,
                                     const std::filesystem::path& runs_dir);

}  // namespace hype::service

#endif  // HYPE_SERVICE_PLATFORM_HPP_
