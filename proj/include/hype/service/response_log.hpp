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

// Append-only response log, one ResponseLogEntry per line. The log is the
// single source of truth for scores: every report is a fold over it.

#ifndef HYPE_SERVICE_RESPONSE_LOG_HPP_
#define HYPE_SERVICE_RESPONSE_LOG_HPP_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <vector>

#include "hype/service/records.hpp"

namespace hype::service {

struct LogReplay {
  std::vector<ResponseLogEntry> entries;
  // The final line was cut short (no newline and not parseable) and was
  // dropped; scores over this replay are marked partial.
  bool truncated_tail = false;
};

// Checks global log_index continuity, per-session sequence continuity and
// per-session consistency of run, evaluator and mode. Any violation throws
// CorruptionError with the zero-based line index of the first bad line.
LogReplay replay_log(std::istream& in);
// A missing file replays as empty.
LogReplay replay_log(const std::filesystem::path& path);

// Writer side. Each append is flushed and synced before returning, so a
// crash loses at most the entry being written. Thread-safe.
class ResponseLogWriter {
 public:
  // Opens for append; `next_index` is the log_index of the next entry.
  ResponseLogWriter(const std::filesystem::path& path, uint64_t next_index);
  ~ResponseLogWriter();
  ResponseLogWriter(const ResponseLogWriter&) = delete;
  ResponseLogWriter& operator=(const ResponseLogWriter&) = delete;

  // Assigns log_index and writes the entry. Returns the stored entry.
  ResponseLogEntry append(ResponseLogEntry entry);
  uint64_t next_index() const;

 private:
  mutable std::mutex mu_;
  std::FILE* file_ = nullptr;
  uint64_t next_index_ = 0;
};

// Writes one JSON value per line and syncs; used for session records.
void append_json_line(const std::filesystem::path& path, const nlohmann::json& value);

// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace hype::service

#endif  // HYPE_SERVICE_RESPONSE_LOG_HPP_
