// Copyright 2026 The TALENT Harness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP session service.
//
//   POST /v1/sessions                    {image_base64, resolution?}
//   GET  /v1/sessions/{id}
//   POST /v1/sessions/{id}/ask           {question, strategy?}
//   POST /v1/sessions/{id}/resolution    {resolution}
//   POST /v1/runs                        {spec: {<config keys>}}
//   GET  /v1/runs/{id}
//   GET  /v1/runs/{id}/report
//   GET  /v1/healthz
//
// A session computes its table's dual representation once; asks reuse it
// and cost one LLM call each. Errors are {"code", "message"}.

#ifndef TALENT_SERVICE_H_
#define TALENT_SERVICE_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "talent/config.h"
#include "talent/runner.h"

namespace httplib {
class Server;
}

namespace talent {

struct ServiceOptions {
  RunConfig base_config;  // endpoints, transport, cache for sessions and runs
  std::chrono::seconds session_ttl{3600};
  std::optional<std::filesystem::path> session_dir;
  std::string cors_origin = "*";
  // Replaces the transport built from base_config (tests).
  TransportHandle wire;
  std::function<std::chrono::steady_clock::time_point()> now;
};

class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port;
  // returns the bound port.
  int Start(const std::string& host, int port);
  // Serves on the calling thread until Stop().
  void ListenBlocking(const std::string& host, int port);
  void Stop();

  const Harness& harness() const { return harness_; }

 private:
  struct Session;
  struct Run;

  void Mount();
  std::shared_ptr<Session> FindSession(const std::string& id);
  void Persist(const Session& session) const;
  std::shared_ptr<Session> LoadPersisted(const std::string& id);
  void Expire();

  nlohmann::ordered_json CreateSession(const nlohmann::json& body);
  nlohmann::ordered_json Ask(const std::string& id, const nlohmann::json& body);
  nlohmann::ordered_json SessionSummary(const std::string& id);
  nlohmann::ordered_json ChangeResolution(const std::string& id,
                                          const nlohmann::json& body);
  nlohmann::ordered_json LaunchRun(const nlohmann::json& body);
  nlohmann::ordered_json RunState(const std::string& id);
  std::string RunReport(const std::string& id);

  ServiceOptions options_;
  Harness harness_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;

  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;

  std::mutex runs_mu_;
  std::map<std::string, std::shared_ptr<Run>> runs_;
  std::vector<std::thread> run_threads_;
};

}  // namespace talent

#endif  // TALENT_SERVICE_H_
