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

// Service configuration. The JSON file has one object per section:
//
//   { "staircase":     { "start_exposure_ms": 500, ... },
//     "qualification": { "required": true, "threshold": 0.65, ... },
//     "payment":       { "base_cents": 100, "bonus_per_correct_cents": 2 },
//     "server":        { "host": "127.0.0.1", "port": 8080, ... },
//     "bootstrap":     { "resample_size": 30, "iterations": 10000, ... },
//     "presentation":  { "countdown_steps": 3, ... },
//     "seed": 0 }
//
// Every key is optional. Environment variables named HYPE_<SECTION>_<KEY>
// (upper case, e.g. HYPE_SERVER_PORT) override the file; HYPE_SEED
// overrides the top-level seed.

#ifndef HYPE_SERVICE_CONFIG_HPP_
#define HYPE_SERVICE_CONFIG_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "hype/masks.hpp"
#include "hype/staircase.hpp"
#include "hype/stats.hpp"
#include "hype/tasks.hpp"
#include "json.hpp"

namespace hype::service {

inline constexpr const char* kEnvPrefix = "HYPE_";

struct QualificationConfig {
  bool required = true;
  QualificationRule rule;
  bool allow_single_model = false;
  uint64_t seed = 0;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "hype-data";
  std::chrono::seconds session_idle_timeout{7200};
  int threads = 8;
};

struct PresentationConfig {
  int countdown_steps = 3;
  milliseconds countdown_step{500};
  milliseconds mask_duration{30};
  milliseconds inter_trial_interval{500};
  MaskGenerator mask_generator = MaskGenerator::kPatchShuffle;
  // Measured exposures further than this from the commanded value are
  // flagged for review (two frames at 60 Hz).
  double timing_flag_ms = 2000.0 / 60.0;
};

struct ServiceConfig {
  StaircaseConfig staircase;
  QualificationConfig qualification;
  PaymentRates payment;
  ServerConfig server;
  BootstrapOptions bootstrap;
  PresentationConfig presentation;
  uint64_t seed = 0;

  // Throws Error(kConfiguration).
  void validate() const;
};

nlohmann::json to_json(const ServiceConfig& config);

// Unknown sections or keys and mistyped values are configuration errors.
ServiceConfig config_from_json(const nlohmann::json& j);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads process environment variables.
EnvLookup process_environment();

// Applies HYPE_* overrides on top of `j` (a config_from_json input).
nlohmann::json apply_env_overrides(nlohmann::json j, const EnvLookup& env);

// File (optional) + environment, validated.
ServiceConfig load_config(const std::optional<std::filesystem::path>& path,
                          const EnvLookup& env = process_environment());

}  // namespace hype::service

#endif  // HYPE_SERVICE_CONFIG_HPP_
