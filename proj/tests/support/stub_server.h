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

// Local OpenAI-compatible chat-completions server backed by a ScriptedModel.
// Counts every request and can be told to fail the next few with given
// HTTP statuses.

#ifndef TALENT_TESTS_SUPPORT_STUB_SERVER_H_
#define TALENT_TESTS_SUPPORT_STUB_SERVER_H_

#include <atomic>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "scripted_model.h"

namespace httplib {
class Server;
}

namespace talent::testing {

class StubServer {
 public:
  explicit StubServer(std::shared_ptr<ScriptedModel> model);
  ~StubServer();

  // "http://127.0.0.1:<port>/v1"
  std::string base_url() const;
  int calls() const { return calls_.load(); }
  void FailNext(std::vector<int> statuses);
  std::vector<std::string> bodies() const;
  std::vector<std::string> authorization_headers() const;

 private:
  std::shared_ptr<ScriptedModel> model_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  mutable std::mutex mu_;
  std::deque<int> failures_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

}  // namespace talent::testing

#endif  // TALENT_TESTS_SUPPORT_STUB_SERVER_H_
