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

#include "hype/service/http_server.hpp"

#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "hype/image.hpp"
#include "httplib.h"
#include "service_fixtures.hpp"

namespace hype::service {
namespace {

using fixtures::LabelOracle;
using fixtures::TempDir;

std::string pool_body(const ImagePool& pool) {
  std::ostringstream out;
  write_pool_manifest(out, pool);
  return out.str();
}

// Keys that reveal the truth of a trial and so must never precede the answer.
bool leaks_truth(const nlohmann::json& j) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (key == "truth" || key == "correct" || key == "answer" || key == "image_id" ||
          key == "source" || key == "stimuli") {
        return true;
      }
      if (leaks_truth(value)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (leaks_truth(v)) return true;
    }
  } else if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    return s.find("real-") != std::string::npos || s.find("fake-") != std::string::npos;
  }
  return false;
}

class HttpApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = fixtures::test_config(dir_.path() / "data");
    pool_a_ = fixtures::make_image_pool(dir_.path() / "img-a", "pool-a", "gan-a", 110, 1);
    pool_b_ = fixtures::make_image_pool(dir_.path() / "img-b", "pool-b", "gan-b", 110, 2);
    oracle_.add(pool_a_);
    oracle_.add(pool_b_);
    platform_ = std::make_unique<Platform>(config_);
    server_ = std::make_unique<HttpServer>(*platform_);
    server_->bind("127.0.0.1", 0);
    server_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", server_->port());
    client_->set_read_timeout(30, 0);
  }

  void TearDown() override { server_->stop(); }

  struct Reply {
    int status = 0;
    nlohmann::json body;
    std::string raw;
    std::string content_type;
  };

  static Reply wrap(const httplib::Result& r) {
    Reply out;
    if (!r) {
      ADD_FAILURE() << "request failed: " << httplib::to_string(r.error());
      return out;
    }
    out.status = r->status;
    out.raw = r->body;
    out.content_type = r->get_header_value("Content-Type");
    if (out.content_type.rfind("application/json", 0) == 0) out.body = nlohmann::json::parse(r->body);
    return out;
  }

  Reply get(const std::string& path) { return wrap(client_->Get(path)); }
  Reply post(const std::string& path, const nlohmann::json& body) {
    return wrap(client_->Post(path, body.dump(), "application/json"));
  }
  Reply post_text(const std::string& path, const std::string& body, const std::string& type) {
    return wrap(client_->Post(path, body, type));
  }
  Reply put(const std::string& path, const std::string& body) {
    return wrap(client_->Put(path, body, "application/x-ndjson"));
  }

  void setup_runs() {
    ASSERT_EQ(put("/pools/pool-a", pool_body(pool_a_)).status, 201);
    ASSERT_EQ(put("/pools/pool-b", pool_body(pool_b_)).status, 201);
    for (const char* model : {"gan-a", "gan-b"}) {
      const std::string suffix = std::string(model).substr(4);
      ASSERT_EQ(post("/runs", {{"run_id", "run-" + suffix},
                               {"model_id", model},
                               {"mode", "infinity"},
                               {"pool_id", "pool-" + suffix},
                               {"target_evaluators", 2}})
                    .status,
                201);
    }
  }

  // Plays a full session over HTTP; the evaluator is right unless
  // `seq % miss_every == 0`.
  void play(const std::string& sid, int miss_every) {
    for (int seq = 0;; ++seq) {
      const Reply next = get("/sessions/" + sid + "/next");
      if (next.status == 410) break;
      ASSERT_EQ(next.status, 200) << next.raw;
      EXPECT_FALSE(leaks_truth(next.body)) << next.raw;
      const Reply image = get(next.body["image_uri"].get<std::string>());
      ASSERT_EQ(image.status, 200);
      const Label truth =
          oracle_.truth(std::vector<unsigned char>(image.raw.begin(), image.raw.end()));
      const bool right = seq % miss_every != 0;
      const Reply r = post("/sessions/" + sid + "/responses",
                           {{"sequence", seq}, {"answer", std::string(to_string(right ? truth : opposite(truth)))}});
      ASSERT_EQ(r.status, 200) << r.raw;
      EXPECT_EQ(r.body["correct"], right);
    }
  }

  TempDir dir_;
  ServiceConfig config_;
  ImagePool pool_a_;
  ImagePool pool_b_;
  LabelOracle oracle_;
  std::unique_ptr<Platform> platform_;
  std::unique_ptr<HttpServer> server_;
  std::unique_ptr<httplib::Client> client_;
};

TEST(HttpStatus, MapsErrorKinds) {
  EXPECT_EQ(http_status(ErrorKind::kInput), 400);
  EXPECT_EQ(http_status(ErrorKind::kValidation), 400);
  EXPECT_EQ(http_status(ErrorKind::kAuthorization), 403);
  EXPECT_EQ(http_status(ErrorKind::kNotFound), 404);
  EXPECT_EQ(http_status(ErrorKind::kBetweenSubjects), 409);
  EXPECT_EQ(http_status(ErrorKind::kSequencing), 409);
  EXPECT_EQ(http_status(ErrorKind::kConflict), 409);
  EXPECT_EQ(http_status(ErrorKind::kTerminal), 410);
  EXPECT_EQ(http_status(ErrorKind::kReference), 422);
  EXPECT_EQ(http_status(ErrorKind::kCapacity), 422);
  EXPECT_EQ(http_status(ErrorKind::kCorruption), 500);
}

TEST_F(HttpApiTest, HealthAndErrorEnvelope) {
  const Reply h = get("/healthz");
  EXPECT_EQ(h.status, 200);
  const Reply missing = get("/runs/nope");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(missing.body["error"]["kind"], "not_found");
  EXPECT_FALSE(missing.body["error"]["message"].get<std::string>().empty());
  const Reply bad_json = post_text("/runs", "{not json", "application/json");
  EXPECT_EQ(bad_json.status, 400);
  EXPECT_EQ(post("/runs", {{"run_id", "x"}, {"model_id", "m"}, {"mode", "infinity"}, {"pool_id", "none"}})
                .status,
            422);
}

TEST_F(HttpApiTest, SessionFlowStatusCodes) {
  setup_runs();
  EXPECT_EQ(put("/pools/pool-a", pool_body(pool_a_)).status, 409);
  EXPECT_EQ(get("/pools").body["pools"], (nlohmann::json{"pool-a", "pool-b"}));
  EXPECT_EQ(get("/runs").body["runs"].size(), 2u);

  const Reply created = post("/runs/run-a/sessions", {{"evaluator_id", "alice"}});
  ASSERT_EQ(created.status, 201);
  EXPECT_FALSE(leaks_truth(created.body)) << created.raw;
  const std::string sid = created.body["session_id"];
  EXPECT_EQ(post("/runs/run-a/sessions", {{"evaluator_id", "alice"}}).status, 409);
  EXPECT_EQ(post("/runs/run-a/sessions", nlohmann::json::object()).status, 400);
  EXPECT_EQ(post("/runs/run-z/sessions", {{"evaluator_id", "alice"}}).status, 404);

  EXPECT_EQ(get("/sessions/" + sid + "/next?sequence=4").status, 409);
  const Reply next = get("/sessions/" + sid + "/next?sequence=0");
  ASSERT_EQ(next.status, 200);
  EXPECT_FALSE(leaks_truth(next.body)) << next.raw;
  EXPECT_EQ(get("/sessions/" + sid + "/next").body, next.body);
  EXPECT_EQ(get("/sessions/" + sid + "/stimuli/1/image").status, 404);
  EXPECT_EQ(get("/sessions/" + sid + "/stimuli/0/masks/0").status, 404);

  const Reply image = get(next.body["image_uri"].get<std::string>());
  EXPECT_EQ(image.status, 200);
  EXPECT_EQ(image.content_type, "image/png");

  const nlohmann::json body = {{"sequence", 0}, {"answer", "real"}};
  const Reply first = post("/sessions/" + sid + "/responses", body);
  ASSERT_EQ(first.status, 200);
  const Reply again = post("/sessions/" + sid + "/responses", body);
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(again.raw, first.raw);
  EXPECT_EQ(post("/sessions/" + sid + "/responses", {{"sequence", 5}, {"answer", "real"}}).status, 409);
  EXPECT_EQ(post("/sessions/" + sid + "/responses", {{"sequence", 1}}).status, 400);
  EXPECT_EQ(get("/sessions/" + sid).body["answered"], 1);
  EXPECT_EQ(get("/sessions/unknown/next").status, 404);
}

TEST_F(HttpApiTest, ScoresCompareAndMetrics) {
  setup_runs();
  EXPECT_EQ(get("/runs/run-a/score").status, 409);
  for (const char* run : {"run-a", "run-b"}) {
    for (const char* who : {"alice", "bob"}) {
      const Reply s = post(std::string("/runs/") + run + "/sessions", {{"evaluator_id", who}});
      ASSERT_EQ(s.status, 201);
      play(s.body["session_id"], std::string(run) == "run-a" ? (who[0] == 'a' ? 4 : 5) : 10);
    }
  }
  EXPECT_EQ(get("/runs/run-a").body["status"], "complete");
  EXPECT_EQ(post("/runs/run-a/sessions", {{"evaluator_id", "carol"}}).status, 409);

  const Reply score = get("/runs/run-a/score");
  ASSERT_EQ(score.status, 200);
  EXPECT_NEAR(score.body["score"].get<double>(), 22.5, 1e-9);  // 25 and 20 misses per 100
  EXPECT_EQ(score.body["n_evaluators"], 2);

  const Reply metrics = post_text("/metrics", "model_id,metric,value\ngan-a,FID,10\ngan-b,FID,30\n", "text/csv");
  ASSERT_EQ(metrics.status, 200) << metrics.raw;
  EXPECT_EQ(metrics.body["rows"], 2);
  EXPECT_EQ(post_text("/metrics", "model_id,metric,value\ngan-a,FID,x\n", "text/csv").status, 400);

  const Reply cmp = get("/compare?runs=run-a,run-b");
  ASSERT_EQ(cmp.status, 200) << cmp.raw;
  EXPECT_EQ(cmp.body["models"][0]["model_id"], "gan-a");
  EXPECT_FALSE(cmp.body["t_test"].is_null());
  EXPECT_EQ(get("/compare?runs=run-a,run-x").status, 404);

  const Reply evaluator = get("/evaluators/alice");
  ASSERT_EQ(evaluator.status, 200);
  EXPECT_EQ(evaluator.body["sessions"].size(), 2u);
  EXPECT_EQ(get("/evaluators/zed").status, 404);
}

TEST_F(HttpApiTest, TimeModeMasksAndTerminalSession) {
  ASSERT_EQ(put("/pools/pool-a", pool_body(pool_a_)).status, 201);
  ASSERT_EQ(post("/runs", {{"run_id", "t"},
                           {"model_id", "gan-a"},
                           {"mode", "time"},
                           {"pool_id", "pool-a"},
                           {"staircase", {{"trials_per_block", 10}, {"blocks_per_session", 1}}}})
                .status,
            201);
  const std::string sid = post("/runs/t/sessions", {{"evaluator_id", "alice"}}).body["session_id"];
  const Reply next = get("/sessions/" + sid + "/next");
  EXPECT_EQ(next.body["exposure_ms"], 500);
  for (const auto& uri : next.body["mask_uris"]) {
    const Reply mask = get(uri.get<std::string>());
    ASSERT_EQ(mask.status, 200);
    EXPECT_EQ(mask.content_type, "image/png");
    const Raster r = decode_image(std::vector<unsigned char>(mask.raw.begin(), mask.raw.end()));
    EXPECT_EQ(r.width, 16);
  }
  play(sid, 2);
  EXPECT_EQ(get("/sessions/" + sid + "/next").status, 410);
  EXPECT_EQ(post("/sessions/" + sid + "/responses", {{"sequence", 10}, {"answer", "real"}}).status, 410);
  EXPECT_EQ(get("/runs/t/score").status, 200);
}

TEST_F(HttpApiTest, QualificationRouteGatesRuns) {
  platform_.reset();
  server_->stop();
  config_.qualification.required = true;
  platform_ = std::make_unique<Platform>(config_);
  server_ = std::make_unique<HttpServer>(*platform_);
  server_->bind("127.0.0.1", 0);
  server_->start();
  client_ = std::make_unique<httplib::Client>("127.0.0.1", server_->port());
  setup_runs();
  EXPECT_EQ(post("/runs/run-a/sessions", {{"evaluator_id", "alice"}}).status, 403);
  const Reply q = post("/qualifications", {{"evaluator_id", "alice"}});
  ASSERT_EQ(q.status, 201);
  EXPECT_FALSE(leaks_truth(q.body));
  play(q.body["session_id"], 1000);
  EXPECT_EQ(get("/evaluators/alice").body["qualification"]["status"], "passed");
  EXPECT_EQ(post("/runs/run-a/sessions", {{"evaluator_id", "alice"}}).status, 201);
}

TEST_F(HttpApiTest, ConcurrentEvaluatorsDoNotInterfere) {
  setup_runs();
  std::vector<std::string> sids;
  for (const char* who : {"p1", "p2"}) {
    sids.push_back(post("/runs/run-a/sessions", {{"evaluator_id", who}}).body["session_id"]);
  }
  std::vector<std::thread> threads;
  for (const std::string& sid : sids) {
    threads.emplace_back([this, sid] {
      httplib::Client c("127.0.0.1", server_->port());
      for (int seq = 0; seq < 100; ++seq) {
        c.Get("/sessions/" + sid + "/next");
        const auto r = c.Post("/sessions/" + sid + "/responses",
                              nlohmann::json{{"sequence", seq}, {"answer", "real"}}.dump(),
                              "application/json");
        if (!r || r->status != 200) ADD_FAILURE() << sid << " " << seq;
      }
    });
  }
  for (auto& t : threads) t.join();
  const Reply score = get("/runs/run-a/score");
  ASSERT_EQ(score.status, 200);
  EXPECT_NEAR(score.body["score"].get<double>(), 50.0, 1e-9);
  EXPECT_EQ(replay_log(platform_->log_path()).entries.size(), 200u);
}

}  // namespace
}  // namespace hype::service
