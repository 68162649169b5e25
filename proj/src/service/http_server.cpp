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

#include <charconv>
#include <sstream>
#include <string_view>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace hype::service {
namespace {

using httplib::Request;
using httplib::Response;

constexpr const char* kJson = "application/json";

void send_json(Response& res, const nlohmann::json& body, int status = 200) {
  res.status = status;
  res.set_header("Cache-Control", "no-store");
  res.set_content(body.dump(), kJson);
}

void send_error(Response& res, int status, std::string_view kind, const std::string& message) {
  send_json(res, {{"error", {{"kind", kind}, {"message", message}}}}, status);
}

nlohmann::json parse_body(const Request& req) {
  nlohmann::json j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::kInput, "request body is not valid JSON");
  return j;
}

std::string evaluator_from(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("evaluator_id") || !body["evaluator_id"].is_string()) {
    fail(ErrorKind::kInput, "evaluator_id is required");
  }
  return body["evaluator_id"].get<std::string>();
}

int parse_int(const std::string& text, const std::string& what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorKind::kInput, what + " must be an integer");
  }
  return value;
}

std::string image_content_type(const std::vector<unsigned char>& bytes) {
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G') {
    return "image/png";
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return "image/x-portable-anymap";
  }
  return "application/octet-stream";
}

void send_bytes(Response& res, const std::vector<unsigned char>& bytes, const std::string& type) {
  res.status = 200;
  res.set_header("Cache-Control", "no-store");
  res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), type);
}

using Handler = std::function<void(const Request&, Response&)>;

// Maps library errors onto statuses for every route.
Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const Request& req, Response& res) {
    try {
      inner(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.kind()), to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput:
    case ErrorKind::kValidation:
    case ErrorKind::kConfiguration:
      return 400;
    case ErrorKind::kAuthorization:
      return 403;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kState:
    case ErrorKind::kConflict:
    case ErrorKind::kBetweenSubjects:
    case ErrorKind::kSequencing:
      return 409;
    case ErrorKind::kTerminal:
      return 410;
    case ErrorKind::kCapacity:
    case ErrorKind::kReference:
      return 422;
    case ErrorKind::kCorruption:
      return 500;
  }
  return 500;
}

struct HttpServer::Impl {
  Platform& platform;
  httplib::Server server;

  explicit Impl(Platform& p) : platform(p) {
    const int threads = platform.config().server.threads;
    server.new_task_queue = [threads] {
      return new httplib::ThreadPool(static_cast<std::size_t>(threads));
    };
    routes();
  }

  void routes() {
    Platform& p = platform;
    server.Get("/healthz", guarded([](const Request&, Response& res) {
      send_json(res, {{"status", "ok"}});
    }));

    server.Put(R"(/pools/([^/]+))", guarded([&p](const Request& req, Response& res) {
      std::istringstream in(req.body);
      const ImagePool pool = read_pool_manifest(in, req.matches[1]);
      p.put_pool(pool);
      send_json(res,
                {{"pool_id", pool.pool_id},
                 {"real_images", pool.real_images.size()},
                 {"fake_images", pool.fake_images.size()}},
                201);
    }));
    server.Get("/pools", guarded([&p](const Request&, Response& res) {
      send_json(res, {{"pools", p.pool_ids()}});
    }));

    server.Post("/runs", guarded([&p](const Request& req, Response& res) {
      send_json(res, to_json(p.create_run(parse_body(req))), 201);
    }));
    server.Get("/runs", guarded([&p](const Request&, Response& res) {
      nlohmann::json runs = nlohmann::json::array();
      for (const RunManifest& m : p.runs()) runs.push_back(to_json(m));
      send_json(res, {{"runs", runs}});
    }));
    server.Get(R"(/runs/([^/]+))", guarded([&p](const Request& req, Response& res) {
      send_json(res, to_json(p.run(req.matches[1])));
    }));
    server.Get(R"(/runs/([^/]+)/score)", guarded([&p](const Request& req, Response& res) {
      send_json(res, to_json(p.score(req.matches[1]).report));
    }));
    server.Post(R"(/runs/([^/]+)/sessions)", guarded([&p](const Request& req, Response& res) {
      send_json(res, p.start_session(req.matches[1], evaluator_from(parse_body(req))), 201);
    }));
    server.Post("/qualifications", guarded([&p](const Request& req, Response& res) {
      send_json(res, p.start_qualification(evaluator_from(parse_body(req))), 201);
    }));

    server.Get(R"(/sessions/([^/]+))", guarded([&p](const Request& req, Response& res) {
      send_json(res, p.session_status(req.matches[1]));
    }));
    server.Get(R"(/sessions/([^/]+)/next)", guarded([&p](const Request& req, Response& res) {
      std::optional<int> sequence;
      if (req.has_param("sequence")) sequence = parse_int(req.get_param_value("sequence"), "sequence");
      send_json(res, p.next_stimulus(req.matches[1], sequence));
    }));
    server.Post(R"(/sessions/([^/]+)/responses)", guarded([&p](const Request& req, Response& res) {
      send_json(res, p.submit_response(req.matches[1], parse_body(req)));
    }));
    server.Get(R"(/sessions/([^/]+)/stimuli/(\d+)/image)",
               guarded([&p](const Request& req, Response& res) {
                 const auto bytes =
                     p.stimulus_image(req.matches[1], parse_int(req.matches[2], "trial"));
                 send_bytes(res, bytes, image_content_type(bytes));
               }));
    server.Get(R"(/sessions/([^/]+)/stimuli/(\d+)/masks/(\d+))",
               guarded([&p](const Request& req, Response& res) {
                 send_bytes(res,
                            p.stimulus_mask(req.matches[1], parse_int(req.matches[2], "trial"),
                                            parse_int(req.matches[3], "mask")),
                            "image/png");
               }));

    server.Get(R"(/evaluators/([^/]+))", guarded([&p](const Request& req, Response& res) {
      send_json(res, p.evaluator_status(req.matches[1]));
    }));
    server.Get("/compare", guarded([&p](const Request& req, Response& res) {
      if (!req.has_param("runs")) fail(ErrorKind::kInput, "runs parameter is required");
      std::vector<std::string> ids;
      std::stringstream ss(req.get_param_value("runs"));
      std::string id;
      while (std::getline(ss, id, ',')) {
        if (!id.empty()) ids.push_back(id);
      }
      send_json(res, to_json(p.compare(ids)));
    }));
    server.Post("/metrics", guarded([&p](const Request& req, Response& res) {
      p.ingest_metrics(req.body);
      const MetricTable table = p.metrics();
      send_json(res, {{"rows", table.rows().size()}, {"metrics", table.metrics()}});
    }));
  }
};

HttpServer::HttpServer(Platform& platform) : impl_(std::make_unique<Impl>(platform)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ < 0) {
    fail(ErrorKind::kConfiguration, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port_;
}

void HttpServer::listen() {
  if (port_ < 0) fail(ErrorKind::kState, "bind() before listen()");
  impl_->server.listen_after_bind();
}

void HttpServer::start() {
  if (port_ < 0) fail(ErrorKind::kState, "bind() before start()");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace hype::service
