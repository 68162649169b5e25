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

#include "hype/service/platform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hype/error.hpp"
#include "hype/image.hpp"
#include "hype/masks.hpp"
#include "hype/random.hpp"
#include "hype/staircase.hpp"

namespace hype::service {

namespace fs = std::filesystem;

struct Platform::Session {
  SessionRecord record;
  std::mutex mu;
  int next_sequence = 0;
  int correct = 0;
  std::optional<SessionStaircase> staircase;
  std::vector<nlohmann::json> replies;
  std::vector<Judgment> judgments;
  int64_t last_activity_ms = 0;

  int total() const { return static_cast<int>(record.stimuli.size()); }
  bool completed() const { return next_sequence >= total(); }
};

struct Platform::PoolEntry {
  ImagePool pool;
  std::map<std::string, const ImageRecord*, std::less<>> index;
};

namespace {

const std::set<std::string> kDraftKeys = {"run_id",  "model_id",          "dataset_id",
                                          "mode",    "pool_id",           "target_evaluators",
                                          "seeds",   "staircase",         "bootstrap"};

void check_identifier(const std::string& what, const std::string& id, ErrorKind kind) {
  bool ok = !id.empty() && id.size() <= 128 && id.front() != '.';
  for (char c : id) {
    ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.');
  }
  if (!ok) fail(kind, what + " must be 1-128 characters of [A-Za-z0-9._-]");
}

std::string numbered_id(const std::string& prefix, std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", n);
  return prefix + "-s" + buf;
}

// A crash mid-write can leave a final line without its newline. Complete
// JSON gets the newline back; anything else is cut off.
void repair_tail(const fs::path& path) {
  if (!fs::exists(path)) return;
  const std::string data = read_file(path);
  if (data.empty() || data.back() == '\n') return;
  const std::size_t cut = data.rfind('\n');
  const std::size_t start = cut == std::string::npos ? 0 : cut + 1;
  if (!nlohmann::json::parse(data.substr(start), nullptr, false).is_discarded()) {
    std::FILE* f = std::fopen(path.c_str(), "ab");
    if (f == nullptr) fail(ErrorKind::kConfiguration, "cannot repair " + path.string());
    std::fputc('\n', f);
    std::fclose(f);
  } else {
    fs::resize_file(path, start);
  }
}

std::vector<nlohmann::json> read_json_lines(const fs::path& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path);
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        throw CorruptionError(index, path.filename().string() + " line " +
                                         std::to_string(index) + " is not valid JSON");
      }
      out.push_back(std::move(j));
    }
    ++index;
  }
  return out;
}

bool is_remote(std::string_view uri) {
  return uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0;
}

}  // namespace

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

Platform::Platform(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
  config_.validate();
  fs::create_directories(data_dir() / "pools");
  fs::create_directories(data_dir() / "runs");
  recover();
}

Platform::~Platform() = default;

fs::path Platform::log_path() const { return data_dir() / "responses.jsonl"; }

void Platform::recover() {
  std::lock_guard lock(registry_mu_);
  for (const auto& file : fs::directory_iterator(data_dir() / "runs")) {
    if (file.path().extension() != ".json") continue;
    const auto j = nlohmann::json::parse(read_file(file.path()), nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::kCorruption, "unreadable manifest " + file.path().string());
    RunManifest m = run_manifest_from_json(j);
    runs_[m.run_id] = m;
  }
  const fs::path metrics_path = data_dir() / "metrics.csv";
  if (fs::exists(metrics_path)) metrics_ = MetricTable::parse_csv(read_file(metrics_path));

  const fs::path sessions_path = data_dir() / "sessions.jsonl";
  repair_tail(sessions_path);
  for (const auto& j : read_json_lines(sessions_path)) {
    register_session(session_record_from_json(j), false);
  }

  repair_tail(log_path());
  LogReplay replay = replay_log(log_path());
  for (std::size_t i = 0; i < replay.entries.size(); ++i) {
    const ResponseLogEntry& entry = replay.entries[i];
    auto it = sessions_.find(entry.session_id);
    if (it == sessions_.end()) {
      throw CorruptionError(i, "response log line " + std::to_string(i) +
                                   " refers to unknown session " + entry.session_id);
    }
    Session& s = *it->second;
    apply_entry(s, entry);
    if (s.completed()) on_session_complete(s);
  }
  log_ = std::move(replay.entries);
  writer_ = std::make_unique<ResponseLogWriter>(log_path(), log_.size());
  for (const auto& [id, manifest] : runs_) advance_run_status(id);
}

void Platform::write_manifest(const RunManifest& manifest) const {
  write_file_atomically(data_dir() / "runs" / (manifest.run_id + ".json"),
                        to_json(manifest).dump(2) + "\n");
}

void Platform::put_pool(const ImagePool& pool) {
  check_identifier("pool_id", pool.pool_id, ErrorKind::kValidation);
  pool.validate();
  std::lock_guard lock(pool_mu_);
  const fs::path path = data_dir() / "pools" / (pool.pool_id + ".jsonl");
  if (fs::exists(path)) fail(ErrorKind::kConflict, "pool " + pool.pool_id + " already exists");
  const fs::path tmp = path.string() + ".tmp";
  save_pool(tmp, pool);
  fs::rename(tmp, path);
}

std::vector<std::string> Platform::pool_ids() const {
  std::vector<std::string> ids;
  for (const auto& file : fs::directory_iterator(data_dir() / "pools")) {
    if (file.path().extension() == ".jsonl") ids.push_back(file.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::shared_ptr<const Platform::PoolEntry> Platform::pool(const std::string& pool_id) const {
  check_identifier("pool_id", pool_id, ErrorKind::kValidation);
  std::lock_guard lock(pool_mu_);
  if (auto it = pools_.find(pool_id); it != pools_.end()) return it->second;
  const fs::path path = data_dir() / "pools" / (pool_id + ".jsonl");
  if (!fs::exists(path)) fail(ErrorKind::kReference, "pool " + pool_id + " does not exist");
  auto entry = std::make_shared<PoolEntry>();
  entry->pool = load_pool(path);
  for (const auto* half : {&entry->pool.real_images, &entry->pool.fake_images}) {
    for (const ImageRecord& r : *half) entry->index.emplace(r.image_id, &r);
  }
  pools_[pool_id] = entry;
  return entry;
}

std::vector<std::shared_ptr<const Platform::PoolEntry>> Platform::all_pools() const {
  std::vector<std::shared_ptr<const PoolEntry>> out;
  for (const std::string& id : pool_ids()) out.push_back(pool(id));
  return out;
}

RunManifest Platform::create_run(const nlohmann::json& draft) {
  if (!draft.is_object()) fail(ErrorKind::kInput, "run draft must be a JSON object");
  for (const auto& [key, value] : draft.items()) {
    if (!kDraftKeys.count(key)) fail(ErrorKind::kValidation, "unknown run field " + key);
  }
  nlohmann::json full = draft;
  nlohmann::json staircase = to_json(config_.staircase);
  if (draft.contains("staircase")) {
    if (!draft["staircase"].is_object()) fail(ErrorKind::kValidation, "staircase must be an object");
    for (const auto& [key, value] : draft["staircase"].items()) {
      if (!staircase.contains(key)) fail(ErrorKind::kValidation, "unknown staircase field " + key);
      staircase[key] = value;
    }
  }
  full["staircase"] = staircase;
  if (!draft.contains("bootstrap")) {
    full["bootstrap"] = {{"resample_size", config_.bootstrap.resample_size},
                         {"iterations", config_.bootstrap.iterations}};
  }
  full["status"] = "open";
  full["created_at_ms"] = clock_();
  if (!draft.contains("seeds") && draft.contains("run_id") && draft["run_id"].is_string()) {
    const uint64_t base = derive_seed(config_.seed, hash_id(draft["run_id"].get<std::string>()));
    full["seeds"] = {{"assignment", derive_seed(base, 0)},
                     {"bootstrap", derive_seed(base, 1)},
                     {"masks", derive_seed(base, 2)}};
  }
  RunManifest m;
  try {
    m = run_manifest_from_json(full);
  } catch (const Error& e) {
    fail(ErrorKind::kValidation, e.what());
  }
  m.validate();

  std::lock_guard lock(registry_mu_);
  if (runs_.count(m.run_id)) fail(ErrorKind::kConflict, "run " + m.run_id + " already exists");
  const auto entry = pool(m.pool_id);
  const TaskShape shape = m.shape();
  const std::size_t reals = static_cast<std::size_t>(shape.blocks * shape.reals_per_block());
  const std::size_t fakes = static_cast<std::size_t>(shape.blocks * shape.fakes_per_block);
  if (entry->pool.real_images.size() < reals || entry->pool.fake_images.size() < fakes) {
    fail(ErrorKind::kCapacity, "pool " + m.pool_id + " cannot fill a " +
                                   std::to_string(shape.total()) + "-trial session");
  }
  for (const ImageRecord& r : entry->pool.fake_images) {
    if (r.model_id && *r.model_id != m.model_id) {
      fail(ErrorKind::kValidation,
           "pool " + m.pool_id + " holds fakes from model " + *r.model_id);
    }
  }
  write_manifest(m);
  runs_[m.run_id] = m;
  return m;
}

RunManifest Platform::run(const std::string& run_id) const {
  std::lock_guard lock(registry_mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorKind::kNotFound, "run " + run_id + " not found");
  return it->second;
}

std::vector<RunManifest> Platform::runs() const {
  std::lock_guard lock(registry_mu_);
  std::vector<RunManifest> out;
  for (const auto& [id, m] : runs_) out.push_back(m);
  return out;
}

// Requires registry_mu_.
std::shared_ptr<Platform::Session> Platform::register_session(SessionRecord record, bool persist) {
  auto s = std::make_shared<Session>();
  if (record.mode == SessionMode::kTime) {
    auto it = runs_.find(record.run_id);
    if (it == runs_.end()) {
      fail(ErrorKind::kCorruption, "session " + record.session_id + " names unknown run");
    }
    s->staircase.emplace(it->second.staircase);
  }
  if (persist) append_json_line(data_dir() / "sessions.jsonl", to_json(record));
  s->last_activity_ms = record.created_at_ms;
  s->record = std::move(record);
  sessions_[s->record.session_id] = s;
  run_sessions_[s->record.run_id][s->record.evaluator_id] = s->record.session_id;
  return s;
}

// Requires registry_mu_.
void Platform::advance_run_status(const std::string& run_id) {
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return;
  RunManifest& m = it->second;
  RunStatus target = RunStatus::kOpen;
  if (run_sessions_.count(run_id)) target = RunStatus::kCollecting;
  if (completed_per_run_[run_id] >= m.target_evaluators) target = RunStatus::kComplete;
  if (static_cast<int>(target) <= static_cast<int>(m.status)) return;
  check_status_transition(m.status, target);
  m.status = target;
  write_manifest(m);
}

void Platform::apply_entry(Session& s, const ResponseLogEntry& entry) {
  const int seq = entry.sequence;
  if (seq != s.next_sequence || seq >= s.total()) {
    fail(ErrorKind::kCorruption, "entry out of order for session " + s.record.session_id);
  }
  const Stimulus& stim = s.record.stimuli[static_cast<std::size_t>(seq)];
  if (entry.judgment.image_id != stim.image_id || entry.judgment.truth != stim.truth ||
      entry.judgment.evaluator_id != s.record.evaluator_id) {
    fail(ErrorKind::kCorruption, "entry disagrees with the assignment of session " +
                                     s.record.session_id);
  }
  if (s.staircase) {
    if (entry.judgment.exposure_ms != s.staircase->commanded_exposure()) {
      fail(ErrorKind::kCorruption, "entry exposure disagrees with the staircase");
    }
    s.staircase->record(entry.judgment.correct());
  }
  if (entry.judgment.correct()) ++s.correct;
  s.judgments.push_back(entry.judgment);
  s.last_activity_ms = entry.judgment.submitted_at_ms;
  ++s.next_sequence;

  const bool scored = s.record.mode != SessionMode::kQualification;
  const Usd bonus = scored ? running_bonus(s.correct, config_.payment) : Usd{0};
  nlohmann::json reply = {{"session_id", s.record.session_id},
                          {"sequence", seq},
                          {"correct", entry.judgment.correct()},
                          {"timing_flagged", entry.timing_flagged},
                          {"running_bonus", bonus.str()},
                          {"running_bonus_cents", bonus.cents},
                          {"completed", s.completed()},
                          {"next_sequence", s.next_sequence}};
  reply["next_exposure_ms"] = s.staircase && !s.completed()
                                  ? nlohmann::json(s.staircase->commanded_exposure().count())
                                  : nlohmann::json(nullptr);
  s.replies.push_back(std::move(reply));
}

// Requires registry_mu_.
void Platform::on_session_complete(Session& s) {
  if (s.record.mode == SessionMode::kQualification) {
    QualificationRule rule = config_.qualification.rule;
    rule.expected_reals = s.record.shape.blocks * s.record.shape.reals_per_block();
    rule.expected_fakes = s.record.shape.blocks * s.record.shape.fakes_per_block;
    qualification_results_[s.record.evaluator_id] = grade_qualification(s.judgments, rule);
    return;
  }
  ++completed_per_run_[s.record.run_id];
  advance_run_status(s.record.run_id);
}

nlohmann::json Platform::session_descriptor(const Session& s) const {
  return {{"session_id", s.record.session_id},
          {"run_id", s.record.run_id},
          {"evaluator_id", s.record.evaluator_id},
          {"mode", to_string(s.record.mode)},
          {"total", s.total()},
          {"blocks", s.record.shape.blocks},
          {"per_block", s.record.shape.per_block},
          {"disclosure", s.record.disclosure},
          {"next_sequence", s.next_sequence},
          {"completed", s.completed()}};
}

nlohmann::json Platform::start_session(const std::string& run_id, const std::string& evaluator_id) {
  check_identifier("evaluator_id", evaluator_id, ErrorKind::kInput);
  std::lock_guard lock(registry_mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorKind::kNotFound, "run " + run_id + " not found");
  const RunManifest& m = it->second;
  if (m.status == RunStatus::kComplete) fail(ErrorKind::kState, "run " + run_id + " is complete");
  std::size_t existing = 0;
  if (auto r = run_sessions_.find(run_id); r != run_sessions_.end()) {
    if (r->second.count(evaluator_id)) {
      fail(ErrorKind::kBetweenSubjects,
           "evaluator " + evaluator_id + " already has a session in run " + run_id);
    }
    existing = r->second.size();
  }
  std::set<std::string> exclude;
  auto qual = run_sessions_.find(std::string(kQualificationRunId));
  if (qual != run_sessions_.end()) {
    if (auto q = qual->second.find(evaluator_id); q != qual->second.end()) {
      for (const Stimulus& st : sessions_.at(q->second)->record.stimuli) exclude.insert(st.image_id);
    }
  }
  if (config_.qualification.required) {
    auto r = qualification_results_.find(evaluator_id);
    if (r == qualification_results_.end() || !r->second.passed) {
      fail(ErrorKind::kAuthorization, "evaluator " + evaluator_id + " has not passed qualification");
    }
  }
  const auto entry = pool(m.pool_id);
  TaskAssignment task = make_assignment(entry->pool, run_id, evaluator_id, m.mode, m.shape(),
                                        m.seeds.assignment, exclude);
  SessionRecord record{numbered_id(run_id, existing),
                       run_id,
                       evaluator_id,
                       m.mode,
                       task.shape,
                       std::move(task.stimuli),
                       std::move(task.disclosure),
                       clock_()};
  auto s = register_session(std::move(record), true);
  advance_run_status(run_id);
  return session_descriptor(*s);
}

nlohmann::json Platform::start_qualification(const std::string& evaluator_id) {
  check_identifier("evaluator_id", evaluator_id, ErrorKind::kInput);
  std::lock_guard lock(registry_mu_);
  const std::string run_id(kQualificationRunId);
  std::size_t existing = 0;
  if (auto r = run_sessions_.find(run_id); r != run_sessions_.end()) {
    if (r->second.count(evaluator_id)) {
      fail(ErrorKind::kBetweenSubjects,
           "evaluator " + evaluator_id + " already has a qualification session");
    }
    existing = r->second.size();
  }
  std::vector<ImagePool> pools;
  for (const auto& p : all_pools()) pools.push_back(p->pool);
  TaskAssignment task = build_qualification(pools, config_.qualification.seed, evaluator_id,
                                            config_.qualification.allow_single_model);
  SessionRecord record{numbered_id(run_id, existing),
                       run_id,
                       evaluator_id,
                       SessionMode::kQualification,
                       task.shape,
                       std::move(task.stimuli),
                       disclosure_text(SessionMode::kQualification, task.shape,
                                       config_.qualification.rule.threshold),
                       clock_()};
  return session_descriptor(*register_session(std::move(record), true));
}

std::shared_ptr<Platform::Session> Platform::find_session(const std::string& session_id) const {
  std::lock_guard lock(registry_mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) fail(ErrorKind::kNotFound, "session " + session_id + " not found");
  return it->second;
}

void Platform::check_live(const Session& s) const {
  if (s.completed()) fail(ErrorKind::kTerminal, "session " + s.record.session_id + " is complete");
  const int64_t idle = clock_() - s.last_activity_ms;
  if (idle > std::chrono::duration_cast<std::chrono::milliseconds>(
                 config_.server.session_idle_timeout).count()) {
    fail(ErrorKind::kTerminal, "session " + s.record.session_id + " expired");
  }
}

nlohmann::json Platform::next_stimulus(const std::string& session_id, std::optional<int> sequence) {
  auto sp = find_session(session_id);
  Session& s = *sp;
  std::lock_guard lock(s.mu);
  check_live(s);
  if (sequence && *sequence != s.next_sequence) {
    fail(ErrorKind::kSequencing, "outstanding trial is " + std::to_string(s.next_sequence) +
                                     ", not " + std::to_string(*sequence));
  }
  const int seq = s.next_sequence;
  const Stimulus& stim = s.record.stimuli[static_cast<std::size_t>(seq)];
  const std::string base = "/sessions/" + session_id + "/stimuli/" + std::to_string(seq);
  const PresentationConfig& pc = config_.presentation;
  nlohmann::json d = {{"session_id", session_id},
                      {"run_id", s.record.run_id},
                      {"mode", to_string(s.record.mode)},
                      {"sequence", seq},
                      {"total", s.total()},
                      {"block", stim.block},
                      {"image_uri", base + "/image"},
                      {"inter_trial_interval_ms", pc.inter_trial_interval.count()}};
  if (s.staircase) {
    d["exposure_ms"] = s.staircase->commanded_exposure().count();
    nlohmann::json masks = nlohmann::json::array();
    for (int i = 0; i < kMasksPerStimulus; ++i) masks.push_back(base + "/masks/" + std::to_string(i));
    d["mask_uris"] = std::move(masks);
    d["mask_duration_ms"] = pc.mask_duration.count();
    nlohmann::json steps = nlohmann::json::array();
    for (int i = pc.countdown_steps; i >= 1; --i) steps.push_back(std::to_string(i));
    d["countdown"] = {{"steps", std::move(steps)}, {"step_ms", pc.countdown_step.count()}};
  } else {
    d["exposure_ms"] = nullptr;
    d["mask_uris"] = nlohmann::json::array();
    d["mask_duration_ms"] = nullptr;
    d["countdown"] = nullptr;
  }
  return d;
}

nlohmann::json Platform::submit_response(const std::string& session_id, const nlohmann::json& body) {
  if (!body.is_object()) fail(ErrorKind::kInput, "response body must be a JSON object");
  int sequence = 0;
  Label answer = Label::kReal;
  std::optional<double> measured;
  try {
    sequence = body.at("sequence").get<int>();
    answer = parse_label(body.at("answer").get<std::string>());
    if (body.contains("measured_exposure_ms") && !body["measured_exposure_ms"].is_null()) {
      measured = body["measured_exposure_ms"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInput, std::string("malformed response: ") + e.what());
  }
  if (measured && (!std::isfinite(*measured) || *measured < 0)) {
    fail(ErrorKind::kInput, "measured_exposure_ms must be a non-negative number");
  }

  auto sp = find_session(session_id);
  Session& s = *sp;
  std::lock_guard lock(s.mu);
  if (sequence >= 0 && sequence < s.next_sequence) {
    return s.replies[static_cast<std::size_t>(sequence)];
  }
  check_live(s);
  if (sequence != s.next_sequence) {
    fail(ErrorKind::kSequencing, "outstanding trial is " + std::to_string(s.next_sequence) +
                                     ", not " + std::to_string(sequence));
  }
  const Stimulus& stim = s.record.stimuli[static_cast<std::size_t>(sequence)];
  ResponseLogEntry entry;
  entry.run_id = s.record.run_id;
  entry.session_id = session_id;
  entry.sequence = sequence;
  entry.mode = s.record.mode;
  entry.judgment.evaluator_id = s.record.evaluator_id;
  entry.judgment.image_id = stim.image_id;
  entry.judgment.truth = stim.truth;
  entry.judgment.answer = answer;
  entry.judgment.submitted_at_ms = clock_();
  entry.judgment.measured_exposure_ms = measured;
  if (s.staircase) {
    const milliseconds commanded = s.staircase->commanded_exposure();
    entry.judgment.exposure_ms = commanded;
    entry.timing_flagged = measured && std::fabs(*measured - static_cast<double>(commanded.count())) >
                                           config_.presentation.timing_flag_ms;
  }
  {
    std::lock_guard log_lock(log_mu_);
    entry = writer_->append(std::move(entry));
    log_.push_back(entry);
  }
  apply_entry(s, entry);
  if (s.completed()) {
    std::lock_guard registry_lock(registry_mu_);
    on_session_complete(s);
  }
  return s.replies.back();
}

nlohmann::json Platform::session_status(const std::string& session_id) {
  auto sp = find_session(session_id);
  Session& s = *sp;
  std::lock_guard lock(s.mu);
  nlohmann::json j = session_descriptor(s);
  const bool scored = s.record.mode != SessionMode::kQualification;
  const Usd bonus = scored ? running_bonus(s.correct, config_.payment) : Usd{0};
  j["answered"] = s.next_sequence;
  j["running_bonus"] = bonus.str();
  j["running_bonus_cents"] = bonus.cents;
  j["last_activity_ms"] = s.last_activity_ms;
  return j;
}

nlohmann::json Platform::evaluator_status(const std::string& evaluator_id) {
  std::vector<std::shared_ptr<Session>> owned;
  std::optional<QualificationResult> qualification;
  {
    std::lock_guard lock(registry_mu_);
    for (const auto& [run_id, by_evaluator] : run_sessions_) {
      if (auto it = by_evaluator.find(evaluator_id); it != by_evaluator.end()) {
        owned.push_back(sessions_.at(it->second));
      }
    }
    if (auto it = qualification_results_.find(evaluator_id); it != qualification_results_.end()) {
      qualification = it->second;
    }
  }
  if (owned.empty()) fail(ErrorKind::kNotFound, "evaluator " + evaluator_id + " not found");
  std::vector<Judgment> scored;
  nlohmann::json sessions = nlohmann::json::array();
  bool qualification_started = false;
  for (const auto& sp : owned) {
    std::lock_guard lock(sp->mu);
    sessions.push_back({{"session_id", sp->record.session_id},
                        {"run_id", sp->record.run_id},
                        {"mode", to_string(sp->record.mode)},
                        {"completed", sp->completed()}});
    if (sp->record.mode == SessionMode::kQualification) {
      qualification_started = true;
    } else {
      scored.insert(scored.end(), sp->judgments.begin(), sp->judgments.end());
    }
  }
  const PaymentStatement pay =
      compute_payment(evaluator_id, qualification.has_value(), scored, config_.payment);
  nlohmann::json q;
  if (qualification) {
    q = {{"status", qualification->passed ? "passed" : "failed"},
         {"real_accuracy", qualification->real_accuracy},
         {"fake_accuracy", qualification->fake_accuracy},
         {"threshold", qualification->threshold}};
  } else {
    q = {{"status", qualification_started ? "in_progress" : "none"}};
  }
  return {{"evaluator_id", evaluator_id},
          {"qualification", q},
          {"sessions", sessions},
          {"payment",
           {{"base", pay.base.str()}, {"bonus", pay.bonus.str()}, {"total", pay.total.str()},
            {"total_cents", pay.total.cents}}}};
}

std::vector<unsigned char> Platform::image_bytes(const Session& s, int sequence) const {
  const std::string& image_id = s.record.stimuli[static_cast<std::size_t>(sequence)].image_id;
  const ImageRecord* record = nullptr;
  std::vector<std::shared_ptr<const PoolEntry>> candidates;
  if (s.record.mode == SessionMode::kQualification) {
    candidates = all_pools();
  } else {
    candidates.push_back(pool(run(s.record.run_id).pool_id));
  }
  for (const auto& p : candidates) {
    if (auto it = p->index.find(image_id); it != p->index.end()) {
      record = it->second;
      break;
    }
  }
  if (record == nullptr) fail(ErrorKind::kNotFound, "image is no longer in its pool");
  std::string uri = record->uri;
  if (is_remote(uri)) fail(ErrorKind::kNotFound, "remote image URIs are not served");
  if (uri.rfind("file://", 0) == 0) uri = uri.substr(7);
  fs::path path(uri);
  if (path.is_relative()) path = data_dir() / path;
  const std::string data = read_file(path);
  std::vector<unsigned char> bytes(data.begin(), data.end());
  if (!verify_checksum(*record, bytes)) {
    fail(ErrorKind::kCorruption, "image bytes do not match the pool checksum");
  }
  return bytes;
}

std::vector<unsigned char> Platform::stimulus_image(const std::string& session_id, int sequence) {
  auto sp = find_session(session_id);
  std::lock_guard lock(sp->mu);
  if (sequence < 0 || sequence > sp->next_sequence || sequence >= sp->total()) {
    fail(ErrorKind::kNotFound, "no such trial");
  }
  return image_bytes(*sp, sequence);
}

std::vector<unsigned char> Platform::stimulus_mask(const std::string& session_id, int sequence,
                                                   int index) {
  auto sp = find_session(session_id);
  std::lock_guard lock(sp->mu);
  if (!sp->staircase || index < 0 || index >= kMasksPerStimulus || sequence < 0 ||
      sequence > sp->next_sequence || sequence >= sp->total()) {
    fail(ErrorKind::kNotFound, "no such mask");
  }
  const std::string& image_id = sp->record.stimuli[static_cast<std::size_t>(sequence)].image_id;
  const uint64_t seed = derive_seed(run(sp->record.run_id).seeds.masks, hash_id(image_id));
  const MaskSet masks = generate_masks(image_id, image_bytes(*sp, sequence),
                                       config_.presentation.mask_generator, seed);
  return encode_png(masks.masks[static_cast<std::size_t>(index)]);
}

ScoredRun Platform::score(const std::string& run_id) const {
  const RunManifest manifest = run(run_id);
  std::vector<ResponseLogEntry> entries;
  {
    std::lock_guard lock(log_mu_);
    for (const ResponseLogEntry& e : log_) {
      if (e.run_id == run_id) entries.push_back(e);
    }
  }
  return score_run(manifest, entries, false, config_.bootstrap.threads);
}

ComparisonReport Platform::compare(std::span<const std::string> run_ids) const {
  std::vector<ScoredRun> scored;
  for (const std::string& id : run_ids) scored.push_back(score(id));
  return compare_models(scored, metrics());
}

void Platform::ingest_metrics(std::string_view csv) {
  const MetricTable upload = MetricTable::parse_csv(csv);
  std::lock_guard lock(registry_mu_);
  MetricTable merged = metrics_;
  merged.merge(upload);
  write_file_atomically(data_dir() / "metrics.csv", merged.to_csv());
  metrics_ = std::move(merged);
}

MetricTable Platform::metrics() const {
  std::lock_guard lock(registry_mu_);
  return metrics_;
}

std::vector<ScoredRun> replay_scores(const fs::path& log, const fs::path& runs_dir) {
  const LogReplay replay = replay_log(log);
  std::set<std::string> run_ids;
  for (const ResponseLogEntry& e : replay.entries) {
    if (e.run_id != kQualificationRunId) run_ids.insert(e.run_id);
  }
  std::vector<ScoredRun> out;
  for (const std::string& id : run_ids) {
    const fs::path path = runs_dir / (id + ".json");
    if (!fs::exists(path)) fail(ErrorKind::kReference, "no manifest for run " + id);
    const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::kCorruption, "unreadable manifest " + path.string());
    try {
      out.push_back(score_run(run_manifest_from_json(j), replay.entries, replay.truncated_tail));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kState) throw;
    }
  }
  return out;
}

}  // namespace hype::service
