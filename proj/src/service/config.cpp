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

#include "hype/service/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "hype/error.hpp"

namespace hype::service {
namespace {

bool same_kind(const nlohmann::json& expected, const nlohmann::json& got) {
  if (expected.is_boolean()) return got.is_boolean();
  if (expected.is_number_unsigned()) {
    return got.is_number_unsigned() || (got.is_number_integer() && got.get<int64_t>() >= 0);
  }
  if (expected.is_number_integer()) {
    return got.is_number_integer() || got.is_number_unsigned();
  }
  if (expected.is_number()) return got.is_number();
  if (expected.is_string()) return got.is_string();
  if (expected.is_object()) return got.is_object();
  return false;
}

// Overlays `user` onto `defaults`, rejecting keys the defaults lack.
void overlay(nlohmann::json& defaults, const nlohmann::json& user, const std::string& where) {
  if (!user.is_object()) fail(ErrorKind::kConfiguration, where + " must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!defaults.contains(key)) fail(ErrorKind::kConfiguration, "unknown config key " + path);
    nlohmann::json& slot = defaults[key];
    if (!same_kind(slot, value)) {
      fail(ErrorKind::kConfiguration, "config key " + path + " has the wrong type");
    }
    if (slot.is_object()) {
      overlay(slot, value, path);
    } else {
      slot = value;
    }
  }
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

nlohmann::json parse_env_value(const nlohmann::json& like, const std::string& name,
                               const std::string& text) {
  try {
    if (like.is_boolean()) {
      const std::string v = upper(text);
      if (v == "1" || v == "TRUE" || v == "YES") return true;
      if (v == "0" || v == "FALSE" || v == "NO") return false;
      throw std::invalid_argument(text);
    }
    std::size_t used = 0;
    if (like.is_number_unsigned()) {
      const unsigned long long v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    if (like.is_number_integer()) {
      const long long v = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    if (like.is_number()) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
  } catch (const std::exception&) {
    fail(ErrorKind::kConfiguration, "environment variable " + name + " has an invalid value");
  }
  return text;
}

}  // namespace

void ServiceConfig::validate() const {
  staircase.validate();
  if (!(qualification.rule.threshold > 0.0 && qualification.rule.threshold <= 1.0)) {
    fail(ErrorKind::kConfiguration, "qualification.threshold must lie in (0, 1]");
  }
  if (payment.base.cents < 0 || payment.bonus_per_correct.cents < 0) {
    fail(ErrorKind::kConfiguration, "payment amounts must be non-negative");
  }
  if (server.port < 0 || server.port > 65535) {
    fail(ErrorKind::kConfiguration, "server.port out of range");
  }
  if (server.session_idle_timeout.count() <= 0) {
    fail(ErrorKind::kConfiguration, "server.session_idle_timeout_s must be positive");
  }
  if (server.threads <= 0) fail(ErrorKind::kConfiguration, "server.threads must be positive");
  if (bootstrap.resample_size == 0 || bootstrap.iterations == 0) {
    fail(ErrorKind::kConfiguration, "bootstrap sizes must be positive");
  }
  if (presentation.countdown_steps < 0 || presentation.countdown_step.count() < 0 ||
      presentation.mask_duration.count() <= 0 || presentation.inter_trial_interval.count() < 0) {
    fail(ErrorKind::kConfiguration, "presentation timings must be non-negative");
  }
}

nlohmann::json to_json(const ServiceConfig& c) {
  return {
      {"staircase",
       {{"start_exposure_ms", c.staircase.start_exposure.count()},
        {"min_exposure_ms", c.staircase.min_exposure.count()},
        {"max_exposure_ms", c.staircase.max_exposure.count()},
        {"step_down_on_correct_ms", c.staircase.step_down_on_correct.count()},
        {"step_up_on_incorrect_ms", c.staircase.step_up_on_incorrect.count()},
        {"trials_per_block", c.staircase.trials_per_block},
        {"blocks_per_session", c.staircase.blocks_per_session},
        {"fake_fraction", c.staircase.fake_fraction}}},
      {"qualification",
       {{"required", c.qualification.required},
        {"threshold", c.qualification.rule.threshold},
        {"require_both_classes", c.qualification.rule.require_both_classes},
        {"allow_single_model", c.qualification.allow_single_model},
        {"seed", c.qualification.seed}}},
      {"payment",
       {{"base_cents", c.payment.base.cents},
        {"bonus_per_correct_cents", c.payment.bonus_per_correct.cents}}},
      {"server",
       {{"host", c.server.host},
        {"port", c.server.port},
        {"data_dir", c.server.data_dir.string()},
        {"session_idle_timeout_s", c.server.session_idle_timeout.count()},
        {"threads", c.server.threads}}},
      {"bootstrap",
       {{"resample_size", c.bootstrap.resample_size},
        {"iterations", c.bootstrap.iterations},
        {"threads", c.bootstrap.threads}}},
      {"presentation",
       {{"countdown_steps", c.presentation.countdown_steps},
        {"countdown_step_ms", c.presentation.countdown_step.count()},
        {"mask_duration_ms", c.presentation.mask_duration.count()},
        {"inter_trial_interval_ms", c.presentation.inter_trial_interval.count()},
        {"mask_generator", std::string(to_string(c.presentation.mask_generator))},
        {"timing_flag_ms", c.presentation.timing_flag_ms}}},
      {"seed", c.seed},
  };
}

ServiceConfig config_from_json(const nlohmann::json& user) {
  nlohmann::json j = to_json(ServiceConfig{});
  overlay(j, user, "");
  ServiceConfig c;
  const auto& s = j["staircase"];
  c.staircase.start_exposure = milliseconds(s["start_exposure_ms"].get<int64_t>());
  c.staircase.min_exposure = milliseconds(s["min_exposure_ms"].get<int64_t>());
  c.staircase.max_exposure = milliseconds(s["max_exposure_ms"].get<int64_t>());
  c.staircase.step_down_on_correct = milliseconds(s["step_down_on_correct_ms"].get<int64_t>());
  c.staircase.step_up_on_incorrect = milliseconds(s["step_up_on_incorrect_ms"].get<int64_t>());
  c.staircase.trials_per_block = s["trials_per_block"].get<int>();
  c.staircase.blocks_per_session = s["blocks_per_session"].get<int>();
  c.staircase.fake_fraction = s["fake_fraction"].get<double>();

  const auto& q = j["qualification"];
  c.qualification.required = q["required"].get<bool>();
  c.qualification.rule.threshold = q["threshold"].get<double>();
  c.qualification.rule.require_both_classes = q["require_both_classes"].get<bool>();
  c.qualification.allow_single_model = q["allow_single_model"].get<bool>();
  c.qualification.seed = q["seed"].get<uint64_t>();

  c.payment.base.cents = j["payment"]["base_cents"].get<int64_t>();
  c.payment.bonus_per_correct.cents = j["payment"]["bonus_per_correct_cents"].get<int64_t>();

  const auto& sv = j["server"];
  c.server.host = sv["host"].get<std::string>();
  c.server.port = sv["port"].get<int>();
  c.server.data_dir = sv["data_dir"].get<std::string>();
  c.server.session_idle_timeout = std::chrono::seconds(sv["session_idle_timeout_s"].get<int64_t>());
  c.server.threads = sv["threads"].get<int>();

  const auto& b = j["bootstrap"];
  c.bootstrap.resample_size = b["resample_size"].get<std::size_t>();
  c.bootstrap.iterations = b["iterations"].get<std::size_t>();
  c.bootstrap.threads = b["threads"].get<unsigned>();

  const auto& p = j["presentation"];
  c.presentation.countdown_steps = p["countdown_steps"].get<int>();
  c.presentation.countdown_step = milliseconds(p["countdown_step_ms"].get<int64_t>());
  c.presentation.mask_duration = milliseconds(p["mask_duration_ms"].get<int64_t>());
  c.presentation.inter_trial_interval = milliseconds(p["inter_trial_interval_ms"].get<int64_t>());
  try {
    c.presentation.mask_generator = parse_mask_generator(p["mask_generator"].get<std::string>());
  } catch (const Error& e) {
    fail(ErrorKind::kConfiguration, e.what());
  }
  c.presentation.timing_flag_ms = p["timing_flag_ms"].get<double>();

  c.seed = j["seed"].get<uint64_t>();
  c.validate();
  return c;
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

nlohmann::json apply_env_overrides(nlohmann::json j, const EnvLookup& env) {
  const nlohmann::json defaults = to_json(ServiceConfig{});
  if (!j.is_object()) j = nlohmann::json::object();
  for (const auto& [section, body] : defaults.items()) {
    if (!body.is_object()) {
      const std::string name = kEnvPrefix + upper(section);
      if (auto v = env(name)) j[section] = parse_env_value(body, name, *v);
      continue;
    }
    for (const auto& [key, like] : body.items()) {
      const std::string name = kEnvPrefix + upper(section) + "_" + upper(key);
      if (auto v = env(name)) j[section][key] = parse_env_value(like, name, *v);
    }
  }
  return j;
}

ServiceConfig load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env) {
  nlohmann::json j = nlohmann::json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) fail(ErrorKind::kConfiguration, "cannot read config file " + path->string());
    j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::kConfiguration, "config file is not valid JSON");
  }
  return config_from_json(apply_env_overrides(std::move(j), env));
}

}  // namespace hype::service
