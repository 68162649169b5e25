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

#include <fstream>
#include <map>

#include <gtest/gtest.h>

#include "hype/error.hpp"
#include "service_fixtures.hpp"

namespace hype::service {
namespace {

using namespace std::chrono_literals;

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::kInput;
}

TEST(ServiceConfig, DefaultsMatchTheProtocol) {
  const ServiceConfig c = config_from_json(nlohmann::json::object());
  EXPECT_EQ(c.staircase, StaircaseConfig{});
  EXPECT_TRUE(c.qualification.required);
  EXPECT_DOUBLE_EQ(c.qualification.rule.threshold, 0.65);
  EXPECT_EQ(c.payment.base.cents, 100);
  EXPECT_EQ(c.payment.bonus_per_correct.cents, 2);
  EXPECT_EQ(c.bootstrap.resample_size, 30u);
  EXPECT_EQ(c.bootstrap.iterations, 10000u);
  EXPECT_EQ(c.presentation.countdown_steps, 3);
  EXPECT_EQ(c.presentation.countdown_step, 500ms);
  EXPECT_EQ(c.presentation.mask_duration, 30ms);
  EXPECT_EQ(c.server.session_idle_timeout, 2h);
}

TEST(ServiceConfig, RoundTripsThroughJson) {
  ServiceConfig c;
  c.staircase.start_exposure = 600ms;
  c.server.port = 9001;
  c.presentation.mask_generator = MaskGenerator::kPhaseScramble;
  c.seed = 42;
  const ServiceConfig back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(ServiceConfig, PartialSectionsKeepOtherDefaults) {
  const ServiceConfig c = config_from_json({{"staircase", {{"trials_per_block", 100}}}});
  EXPECT_EQ(c.staircase.trials_per_block, 100);
  EXPECT_EQ(c.staircase.start_exposure, 500ms);
}

TEST(ServiceConfig, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_EQ(kind_of([] { config_from_json({{"staircse", nlohmann::json::object()}}); }),
            ErrorKind::kConfiguration);
  EXPECT_EQ(kind_of([] { config_from_json({{"server", {{"prot", 1}}}}); }),
            ErrorKind::kConfiguration);
  EXPECT_EQ(kind_of([] { config_from_json({{"server", {{"port", "80"}}}}); }),
            ErrorKind::kConfiguration);
  EXPECT_EQ(kind_of([] { config_from_json({{"presentation", {{"mask_generator", "blur"}}}}); }),
            ErrorKind::kConfiguration);
}

TEST(ServiceConfig, ValidatesRanges) {
  EXPECT_EQ(kind_of([] { config_from_json({{"server", {{"port", 70000}}}}); }),
            ErrorKind::kConfiguration);
  EXPECT_EQ(kind_of([] { config_from_json({{"staircase", {{"min_exposure_ms", 2000}}}}); }),
            ErrorKind::kConfiguration);
  EXPECT_EQ(kind_of([] { config_from_json({{"qualification", {{"threshold", 1.5}}}}); }),
            ErrorKind::kConfiguration);
}

TEST(ServiceConfig, EnvironmentOverridesFile) {
  const auto env = fake_env({{"HYPE_SERVER_PORT", "9090"},
                             {"HYPE_STAIRCASE_START_EXPOSURE_MS", "700"},
                             {"HYPE_QUALIFICATION_REQUIRED", "false"},
                             {"HYPE_STAIRCASE_FAKE_FRACTION", "0.5"},
                             {"HYPE_SEED", "18446744073709551615"}});
  const nlohmann::json file = {{"server", {{"port", 8000}, {"host", "0.0.0.0"}}}};
  const ServiceConfig c = config_from_json(apply_env_overrides(file, env));
  EXPECT_EQ(c.server.port, 9090);
  EXPECT_EQ(c.server.host, "0.0.0.0");
  EXPECT_EQ(c.staircase.start_exposure, 700ms);
  EXPECT_FALSE(c.qualification.required);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
}

TEST(ServiceConfig, MalformedEnvironmentValueIsAConfigError) {
  EXPECT_EQ(kind_of([] { apply_env_overrides({}, fake_env({{"HYPE_SERVER_PORT", "80x"}})); }),
            ErrorKind::kConfiguration);
  EXPECT_EQ(kind_of([] {
              apply_env_overrides({}, fake_env({{"HYPE_QUALIFICATION_REQUIRED", "maybe"}}));
            }),
            ErrorKind::kConfiguration);
}

TEST(ServiceConfig, LoadsFileThenEnvironment) {
  fixtures::TempDir dir;
  const auto path = dir.path() / "config.json";
  std::ofstream(path) << R"({"payment": {"bonus_per_correct_cents": 3}, "seed": 5})";
  const ServiceConfig c = load_config(path, fake_env({{"HYPE_SEED", "6"}}));
  EXPECT_EQ(c.payment.bonus_per_correct.cents, 3);
  EXPECT_EQ(c.seed, 6u);
  EXPECT_EQ(kind_of([&] { load_config(dir.path() / "missing.json", fake_env({})); }),
            ErrorKind::kConfiguration);
  std::ofstream(dir.path() / "bad.json") << "{";
  EXPECT_EQ(kind_of([&] { load_config(dir.path() / "bad.json", fake_env({})); }),
            ErrorKind::kConfiguration);
}

}  // namespace
}  // namespace hype::service
