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

#include "hype/service/response_log.hpp"

#include <unistd.h>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "hype/error.hpp"

namespace hype::service {
namespace {

struct SessionCursor {
  int next_sequence = 0;
  std::string run_id;
  std::string evaluator_id;
  SessionMode mode = SessionMode::kInfinity;
};

void write_all(std::FILE* f, const std::string& data, const std::string& what) {
  if (std::fwrite(data.data(), 1, data.size(), f) != data.size() || std::fflush(f) != 0 ||
      ::fsync(::fileno(f)) != 0) {
    fail(ErrorKind::kCorruption, "failed to write " + what);
  }
}

}  // namespace

LogReplay replay_log(std::istream& in) {
  LogReplay out;
  std::map<std::string, SessionCursor> sessions;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    const bool had_newline = !in.eof();
    if (line.empty() && !had_newline) break;
    auto corrupt = [&](const std::string& why) {
      throw CorruptionError(index, "response log line " + std::to_string(index) + ": " + why);
    };
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    ResponseLogEntry entry;
    bool parsed = !j.is_discarded();
    std::string parse_error = "not valid JSON";
    if (parsed) {
      try {
        entry = log_entry_from_json(j);
      } catch (const Error& e) {
        parsed = false;
        parse_error = e.what();
      }
    }
    if (!parsed) {
      if (!had_newline) {
        out.truncated_tail = true;
        break;
      }
      corrupt(parse_error);
    }
    if (entry.log_index != index) {
      corrupt("expected log_index " + std::to_string(index) + ", found " +
              std::to_string(entry.log_index));
    }
    auto [it, inserted] = sessions.try_emplace(entry.session_id);
    SessionCursor& cursor = it->second;
    if (inserted) {
      cursor.run_id = entry.run_id;
      cursor.evaluator_id = entry.judgment.evaluator_id;
      cursor.mode = entry.mode;
    } else if (cursor.run_id != entry.run_id ||
               cursor.evaluator_id != entry.judgment.evaluator_id || cursor.mode != entry.mode) {
      corrupt("session " + entry.session_id + " changes run, evaluator or mode");
    }
    if (entry.sequence != cursor.next_sequence) {
      corrupt("session " + entry.session_id + " expected sequence " +
              std::to_string(cursor.next_sequence) + ", found " + std::to_string(entry.sequence));
    }
    if ((entry.mode == SessionMode::kTime) != entry.judgment.exposure_ms.has_value()) {
      corrupt("exposure_ms must be present exactly for time-mode entries");
    }
    ++cursor.next_sequence;
    out.entries.push_back(std::move(entry));
    ++index;
  }
  return out;
}

LogReplay replay_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return {};
    fail(ErrorKind::kCorruption, "cannot read response log " + path.string());
  }
  return replay_log(in);
}

ResponseLogWriter::ResponseLogWriter(const std::filesystem::path& path, uint64_t next_index)
    : next_index_(next_index) {
  file_ = std::fopen(path.c_str(), "ab");
  if (file_ == nullptr) {
    fail(ErrorKind::kConfiguration, "cannot open response log " + path.string());
  }
}

ResponseLogWriter::~ResponseLogWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

ResponseLogEntry ResponseLogWriter::append(ResponseLogEntry entry) {
  std::lock_guard lock(mu_);
  entry.log_index = next_index_;
  write_all(file_, to_json(entry).dump() + "\n", "response log");
  ++next_index_;
  return entry;
}

uint64_t ResponseLogWriter::next_index() const {
  std::lock_guard lock(mu_);
  return next_index_;
}

void append_json_line(const std::filesystem::path& path, const nlohmann::json& value) {
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (f == nullptr) fail(ErrorKind::kConfiguration, "cannot open " + path.string());
  try {
    write_all(f, value.dump() + "\n", path.string());
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (f == nullptr) fail(ErrorKind::kConfiguration, "cannot write " + tmp.string());
  try {
    write_all(f, contents, tmp.string());
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kNotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hype::service
