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

#ifndef TALENT_TRANSPORT_H_
#define TALENT_TRANSPORT_H_

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "talent/entry_store.h"
#include "talent/model_client.h"
#include "talent/rate_limiter.h"

namespace talent {

// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> SplitBaseUrl(const std::string& base_url);

// HTTP POST to {base_url}/chat/completions. Applies each endpoint's
// requests_per_minute limit before dispatch.
class LiveTransport : public Transport {
 public:
  LiveTransport() = default;

  ChatResponse Send(const ChatRequest& request,
                    const std::string& digest) override;

  // Requests actually put on the wire.
  int dispatched() const { return dispatched_.load(); }

  // Replaces the limiter for `endpoint_name` (tests use simulated clocks).
  void SetLimiter(const std::string& endpoint_name,
                  std::shared_ptr<SlidingWindowLimiter> limiter);

 private:
  std::shared_ptr<SlidingWindowLimiter> LimiterFor(const EndpointConfig& e);

  std::mutex mu_;
  std::map<std::string, std::shared_ptr<SlidingWindowLimiter>> limiters_;
  std::atomic<int> dispatched_{0};
};

// Forwards to `inner` and persists each successful exchange as a fixture.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(TransportHandle inner, std::filesystem::path dir);

  ChatResponse Send(const ChatRequest& request,
                    const std::string& digest) override;

 private:
  TransportHandle inner_;
  EntryStore store_;
};

// Serves fixtures written by RecordingTransport; never touches the network.
// A miss throws Error(kReplayMiss) carrying the digest and prompt summary.
class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(std::filesystem::path dir);

  ChatResponse Send(const ChatRequest& request,
                    const std::string& digest) override;

 private:
  EntryStore store_;
};

struct TransportMode {
  enum class Kind { kLive, kRecord, kReplay };
  Kind kind = Kind::kLive;
  std::filesystem::path dir;  // fixture dir for record/replay

  static TransportMode Parse(std::string_view kind, std::filesystem::path dir);
};

std::string_view ToString(TransportMode::Kind kind);

// Throws Error(kInvalidArgument) when replay's dir is unreadable.
TransportHandle TransportOf(const TransportMode& mode);

}  // namespace talent

#endif  // TALENT_TRANSPORT_H_
