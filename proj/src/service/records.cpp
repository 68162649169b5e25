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

#include "hype/service/records.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "hype/error.hpp"

namespace hype::service {
namespace {

nlohmann::json shape_json(const TaskShape& s) {
  return {{"blocks", s.blocks}, {"per_block", s.per_block}, {"fakes_per_block", s.fakes_per_block}};
}

TaskShape shape_from(const nlohmann::json& j) {
  return {j.at("blocks").get<int>(), j.at("per_block").get<int>(),
          j.at("fakes_per_block").get<int>()};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const StaircaseConfig& c) {
  return {{"start_exposure_ms", c.start_exposure.count()},
          {"min_exposure_ms", c.min_exposure.count()},
          {"max_exposure_ms", c.max_exposure.count()},
          {"step_down_on_correct_ms", c.step_down_on_correct.count()},
          {"step_up_on_incorrect_ms", c.step_up_on_incorrect.count()},
          {"trials_per_block", c.trials_per_block},
          {"blocks_per_session", c.blocks_per_session},
          {"fake_fraction", c.fake_fraction}};
}

StaircaseConfig staircase_config_from_json(const nlohmann::json& j) {
  StaircaseConfig c;
  c.start_exposure = milliseconds(j.at("start_exposure_ms").get<int64_t>());
  c.min_exposure = milliseconds(j.at("min_exposure_ms").get<int64_t>());
  c.max_exposure = milliseconds(j.at("max_exposure_ms").get<int64_t>());
  c.step_down_on_correct = milliseconds(j.at("step_down_on_correct_ms").get<int64_t>());
  c.step_up_on_incorrect = milliseconds(j.at("step_up_on_incorrect_ms").get<int64_t>());
  c.trials_per_block = j.at("trials_per_block").get<int>();
  c.blocks_per_session = j.at("blocks_per_session").get<int>();
  c.fake_fraction = j.at("fake_fraction").get<double>();
  return c;
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kOpen: return "open";
    case RunStatus::kCollecting: return "collecting";
    case RunStatus::kComplete: return "complete";
  }
  return "unknown";
}

RunStatus parse_run_status(std::string_view text) {
  if (text == "open") return RunStatus::kOpen;
  if (text == "collecting") return RunStatus::kCollecting;
  if (text == "complete") return RunStatus::kComplete;
  fail(ErrorKind::kInput, "unknown run status '" + std::string(text) + "'");
}

void check_status_transition(RunStatus from, RunStatus to) {
  if (static_cast<int>(to) <= static_cast<int>(from)) {
    fail(ErrorKind::kState, "run status cannot move from " + std::string(to_string(from)) +
                                " to " + std::string(to_string(to)));
  }
}

TaskShape RunManifest::shape() const {
  return mode == SessionMode::kTime ? TaskShape::time(staircase) : TaskShape::infinity();
}

void RunManifest::validate() const {
  if (run_id.empty()) fail(ErrorKind::kValidation, "run_id is required");
  if (run_id == kQualificationRunId) fail(ErrorKind::kValidation, "run_id is reserved");
  for (char c : run_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) fail(ErrorKind::kValidation, "run_id may only contain [A-Za-z0-9._-]");
  }
  if (model_id.empty()) fail(ErrorKind::kValidation, "model_id is required");
  if (pool_id.empty()) fail(ErrorKind::kValidation, "pool_id is required");
  if (mode == SessionMode::kQualification) {
    fail(ErrorKind::kValidation, "run mode must be time or infinity");
  }
  if (target_evaluators < 1) fail(ErrorKind::kValidation, "target_evaluators must be at least 1");
  if (bootstrap_resample_size == 0 || bootstrap_iterations == 0) {
    fail(ErrorKind::kValidation, "bootstrap sizes must be positive");
  }
  try {
    (void)shape();
  } catch (const Error& e) {
    fail(ErrorKind::kValidation, e.what());
  }
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"run_id", m.run_id},
          {"model_id", m.model_id},
          {"dataset_id", m.dataset_id},
          {"mode", to_string(m.mode)},
          {"pool_id", m.pool_id},
          {"target_evaluators", m.target_evaluators},
          {"seeds",
           {{"assignment", m.seeds.assignment},
            {"bootstrap", m.seeds.bootstrap},
            {"masks", m.seeds.masks}}},
          {"status", to_string(m.status)},
          {"created_at_ms", m.created_at_ms},
          {"staircase", to_json(m.staircase)},
          {"bootstrap",
           {{"resample_size", m.bootstrap_resample_size},
            {"iterations", m.bootstrap_iterations}}}};
}

RunManifest run_manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.run_id = j.at("run_id").get<std::string>();
    m.model_id = j.at("model_id").get<std::string>();
    m.dataset_id = j.value("dataset_id", "");
    m.mode = parse_session_mode(j.at("mode").get<std::string>());
    m.pool_id = j.at("pool_id").get<std::string>();
    m.target_evaluators = j.value("target_evaluators", 30);
    if (j.contains("seeds")) {
      const auto& s = j["seeds"];
      m.seeds = {s.at("assignment").get<uint64_t>(), s.at("bootstrap").get<uint64_t>(),
                 s.at("masks").get<uint64_t>()};
    }
    m.status = parse_run_status(j.value("status", "open"));
    m.created_at_ms = j.value("created_at_ms", int64_t{0});
    if (j.contains("staircase")) m.staircase = staircase_config_from_json(j["staircase"]);
    if (j.contains("bootstrap")) {
      m.bootstrap_resample_size = j["bootstrap"].at("resample_size").get<std::size_t>();
      m.bootstrap_iterations = j["bootstrap"].at("iterations").get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kValidation, std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

nlohmann::json to_json(const SessionRecord& r) {
  nlohmann::json stimuli = nlohmann::json::array();
  for (const Stimulus& s : r.stimuli) {
    stimuli.push_back({{"image_id", s.image_id}, {"truth", to_string(s.truth)}, {"block", s.block}});
  }
  return {{"session_id", r.session_id},
          {"run_id", r.run_id},
          {"evaluator_id", r.evaluator_id},
          {"mode", to_string(r.mode)},
          {"shape", shape_json(r.shape)},
          {"stimuli", std::move(stimuli)},
          {"disclosure", r.disclosure},
          {"created_at_ms", r.created_at_ms}};
}

SessionRecord session_record_from_json(const nlohmann::json& j) {
  SessionRecord r;
  try {
    r.session_id = j.at("session_id").get<std::string>();
    r.run_id = j.at("run_id").get<std::string>();
    r.evaluator_id = j.at("evaluator_id").get<std::string>();
    r.mode = parse_session_mode(j.at("mode").get<std::string>());
    r.shape = shape_from(j.at("shape"));
    for (const auto& s : j.at("stimuli")) {
      r.stimuli.push_back({s.at("image_id").get<std::string>(),
                           parse_label(s.at("truth").get<std::string>()), s.at("block").get<int>()});
    }
    r.disclosure = j.value("disclosure", "");
    r.created_at_ms = j.at("created_at_ms").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInput, std::string("malformed session record: ") + e.what());
  }
  return r;
}

nlohmann::json to_json(const ResponseLogEntry& e) {
  const Judgment& jd = e.judgment;
  return {{"log_index", e.log_index},
          {"run_id", e.run_id},
          {"session_id", e.session_id},
          {"sequence", e.sequence},
          {"mode", to_string(e.mode)},
          {"evaluator_id", jd.evaluator_id},
          {"image_id", jd.image_id},
          {"truth", to_string(jd.truth)},
          {"answer", to_string(jd.answer)},
          {"correct", jd.correct()},
          {"exposure_ms", jd.exposure_ms ? nlohmann::json(jd.exposure_ms->count())
                                         : nlohmann::json(nullptr)},
          {"measured_exposure_ms", jd.measured_exposure_ms
                                       ? nlohmann::json(*jd.measured_exposure_ms)
                                       : nlohmann::json(nullptr)},
          {"received_at_ms", jd.submitted_at_ms},
          {"timing_flagged", e.timing_flagged}};
}

ResponseLogEntry log_entry_from_json(const nlohmann::json& j) {
  ResponseLogEntry e;
  try {
    e.log_index = j.at("log_index").get<uint64_t>();
    e.run_id = j.at("run_id").get<std::string>();
    e.session_id = j.at("session_id").get<std::string>();
    e.sequence = j.at("sequence").get<int>();
    e.mode = parse_session_mode(j.at("mode").get<std::string>());
    Judgment& jd = e.judgment;
    jd.evaluator_id = j.at("evaluator_id").get<std::string>();
    jd.image_id = j.at("image_id").get<std::string>();
    jd.truth = parse_label(j.at("truth").get<std::string>());
    jd.answer = parse_label(j.at("answer").get<std::string>());
    if (!j.at("exposure_ms").is_null()) {
      jd.exposure_ms = milliseconds(j["exposure_ms"].get<int64_t>());
    }
    if (!j.at("measured_exposure_ms").is_null()) {
      jd.measured_exposure_ms = j["measured_exposure_ms"].get<double>();
    }
    jd.submitted_at_ms = j.at("received_at_ms").get<int64_t>();
    e.timing_flagged = j.value("timing_flagged", false);
    if (j.contains("correct") && j["correct"].get<bool>() != jd.correct()) {
      fail(ErrorKind::kInput, "log entry correctness disagrees with its labels");
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::kInput, std::string("malformed log entry: ") + ex.what());
  }
  if (e.sequence < 0) fail(ErrorKind::kInput, "negative sequence number");
  return e;
}

MetricTable MetricTable::parse_csv(std::string_view text) {
  MetricTable table;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    const std::string where = "metric CSV line " + std::to_string(line_no);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "model_id" || fields[1] != "metric" ||
          fields[2] != "value") {
        fail(ErrorKind::kValidation, where + ": expected header model_id,metric,value");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) fail(ErrorKind::kValidation, where + ": expected 3 fields");
    if (fields[0].empty() || fields[1].empty()) {
      fail(ErrorKind::kValidation, where + ": empty model_id or metric");
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), value);
    if (ec != std::errc() || ptr != fields[2].data() + fields[2].size() || !std::isfinite(value)) {
      fail(ErrorKind::kValidation, where + ": value is not a finite number");
    }
    MetricRow row{std::string(fields[0]), std::string(fields[1]), value};
    if (!seen.emplace(row.model_id, row.metric).second) {
      fail(ErrorKind::kValidation,
           where + ": duplicate pair (" + row.model_id + ", " + row.metric + ")");
    }
    table.rows_.push_back(std::move(row));
  }
  if (!header_seen) fail(ErrorKind::kValidation, "metric CSV is empty");
  return table;
}

void MetricTable::merge(const MetricTable& other) {
  for (const MetricRow& row : other.rows_) {
    bool replaced = false;
    for (MetricRow& mine : rows_) {
      if (mine.model_id == row.model_id && mine.metric == row.metric) {
        mine.value = row.value;
        replaced = true;
        break;
      }
    }
    if (!replaced) rows_.push_back(row);
  }
}

std::optional<double> MetricTable::lookup(std::string_view model_id,
                                          std::string_view metric) const {
  for (const MetricRow& row : rows_) {
    if (row.model_id == model_id && row.metric == metric) return row.value;
  }
  return std::nullopt;
}

std::vector<std::string> MetricTable::metrics() const {
  std::vector<std::string> out;
  for (const MetricRow& row : rows_) {
    if (std::find(out.begin(), out.end(), row.metric) == out.end()) out.push_back(row.metric);
  }
  return out;
}

std::string MetricTable::to_csv() const {
  std::ostringstream out;
  out << "model_id,metric,value\n";
  char buf[64];
  for (const MetricRow& row : rows_) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row.value);
    (void)ec;
    out << row.model_id << ',' << row.metric << ',' << std::string_view(buf, ptr - buf) << '\n';
  }
  return out.str();
}

}  // namespace hype::service
