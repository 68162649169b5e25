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

// HTTP+JSON front end for Platform.
//
//   GET  /healthz
//   PUT  /pools/{id}                          body: pool manifest (JSONL)
//   GET  /pools
//   POST /runs                                body: run draft
//   GET  /runs, /runs/{id}, /runs/{id}/score
//   POST /runs/{id}/sessions                  body: {"evaluator_id": ...}
//   POST /qualifications                      body: {"evaluator_id": ...}
//   GET  /sessions/{id}
//   GET  /sessions/{id}/next[?sequence=n]
//   POST /sessions/{id}/responses             body: {"sequence", "answer", ...}
//   GET  /sessions/{id}/stimuli/{n}/image
//   GET  /sessions/{id}/stimuli/{n}/masks/{i}
//   GET  /evaluators/{id}
//   GET  /compare?runs=a,b,...
//   POST /metrics                             body: CSV model_id,metric,value
//
// Failures carry {"error": {"kind": ..., "message": ...}}.

#ifndef HYPE_SERVICE_HTTP_SERVER_HPP_
#define HYPE_SERVICE_HTTP_SERVER_HPP_

#include <memory>
#include <string>
#include <thread>

#include "hype/error.hpp"
#include "hype/service/platform.hpp"

namespace hype::service {

int http_status(ErrorKind kind);

class HttpServer {
 public:
  explicit HttpServer(Platform& platform);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); requires bind().
  void listen();
  // listen() on a background thread.
  void start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace hype::service

#endif  // HYPE_SERVICE_HTTP_SERVER_HPP_
