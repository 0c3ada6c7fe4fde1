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

#include "talent/transport.h"

#include <chrono>

#include "httplib.h"
#include "talent/error.h"
#include "talent/util.h"

namespace talent {

namespace {

std::string Excerpt(const std::string& body, std::size_t n = 300) {
  return body.size() <= n ? body : body.substr(0, n) + "...";
}

bool IsRetryableStatus(int status) { return status == 429 || status >= 500; }

}  // namespace

std::pair<std::string, std::string> SplitBaseUrl(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "base_url must start with http:// or https://: " + base_url);
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  std::string host = base_url.substr(0, path_start);
  std::string prefix =
      path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {host, prefix};
}

void LiveTransport::SetLimiter(const std::string& endpoint_name,
                               std::shared_ptr<SlidingWindowLimiter> limiter) {
  std::lock_guard<std::mutex> lock(mu_);
  limiters_[endpoint_name] = std::move(limiter);
}

std::shared_ptr<SlidingWindowLimiter> LiveTransport::LimiterFor(
    const EndpointConfig& e) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = limiters_.find(e.name);
  if (it != limiters_.end()) return it->second;
  if (!e.requests_per_minute) return nullptr;
  auto limiter = std::make_shared<SlidingWindowLimiter>(
      *e.requests_per_minute, std::chrono::seconds(60));
  limiters_.emplace(e.name, limiter);
  return limiter;
}

ChatResponse LiveTransport::Send(const ChatRequest& request,
                                 const std::string& /*digest*/) {
  const auto& e = request.endpoint;
  auto [host, prefix] = SplitBaseUrl(e.base_url);
  if (auto limiter = LimiterFor(e)) limiter->Acquire();

  // A fresh client per call: httplib::Client is not meant to be shared by
  // concurrent callers.
  httplib::Client client(host);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(e.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      e.timeout - secs);
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_connection_timeout(std::min<long long>(secs.count(), 10), 0);
  httplib::Headers headers;
  if (e.api_key && !e.api_key->empty()) {
    headers.emplace("Authorization", "Bearer " + *e.api_key);
  }

  const auto start = std::chrono::steady_clock::now();
  ++dispatched_;
  auto result = client.Post(prefix + "/chat/completions", headers,
                            SerializeRequestBody(request), "application/json");
  const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  if (!result) {
    throw TransportError(ErrorCode::kRetryable, 0,
                         "endpoint '" + e.name + "': " +
                             httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status < 200 || status >= 300) {
    throw TransportError(
        IsRetryableStatus(status) ? ErrorCode::kRetryable : ErrorCode::kUpstream,
        status,
        "endpoint '" + e.name + "' returned HTTP " + std::to_string(status) +
            ": " + Excerpt(result->body));
  }
  ChatResponse response = ParseResponseBody(result->body);
  response.latency = latency;
  response.from_cache = false;
  return response;
}

RecordingTransport::RecordingTransport(TransportHandle inner,
                                       std::filesystem::path dir)
    : inner_(std::move(inner)), store_(std::move(dir), EntryStore::Layout::kFlat) {}

ChatResponse RecordingTransport::Send(const ChatRequest& request,
                                      const std::string& digest) {
  ChatResponse response = inner_->Send(request, digest);
  CacheEntry entry;
  entry.digest = digest;
  entry.model = request.endpoint.model;
  entry.created_at = UtcTimestamp();
  entry.response = response;
  entry.prompt_summary = PromptSummary(request);
  store_.Put(digest, entry);
  return response;
}

ReplayTransport::ReplayTransport(std::filesystem::path dir)
    : store_(std::move(dir), EntryStore::Layout::kFlat) {}

ChatResponse ReplayTransport::Send(const ChatRequest& request,
                                   const std::string& digest) {
  auto entry = store_.Get(digest);
  if (!entry) {
    throw TransportError(ErrorCode::kReplayMiss, 0,
                         "replay miss for digest " + digest + " (" +
                             request.endpoint.name + "): " +
                             PromptSummary(request));
  }
  ChatResponse r = entry->response;
  r.from_cache = false;
  r.latency = std::chrono::milliseconds(0);
  return r;
}

TransportMode TransportMode::Parse(std::string_view kind,
                                   std::filesystem::path dir) {
  TransportMode m;
  m.dir = std::move(dir);
  if (kind == "live") {
    m.kind = Kind::kLive;
  } else if (kind == "record") {
    m.kind = Kind::kRecord;
  } else if (kind == "replay") {
    m.kind = Kind::kReplay;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown transport '" + std::string(kind) +
                    "' (expected live, record or replay)");
  }
  return m;
}

std::string_view ToString(TransportMode::Kind kind) {
  switch (kind) {
    case TransportMode::Kind::kLive: return "live";
    case TransportMode::Kind::kRecord: return "record";
    case TransportMode::Kind::kReplay: return "replay";
  }
  return "live";
}

TransportHandle TransportOf(const TransportMode& mode) {
  switch (mode.kind) {
    case TransportMode::Kind::kLive:
      return std::make_shared<LiveTransport>();
    case TransportMode::Kind::kRecord: {
      if (mode.dir.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "record mode needs a fixture dir");
      }
      std::error_code ec;
      std::filesystem::create_directories(mode.dir, ec);
      if (ec) {
        throw Error(ErrorCode::kInvalidArgument,
                    "cannot create fixture dir " + mode.dir.string());
      }
      return std::make_shared<RecordingTransport>(
          std::make_shared<LiveTransport>(), mode.dir);
    }
    case TransportMode::Kind::kReplay: {
      std::error_code ec;
      if (mode.dir.empty() || !std::filesystem::is_directory(mode.dir, ec)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "replay fixture dir is not readable: " + mode.dir.string());
      }
      return std::make_shared<ReplayTransport>(mode.dir);
    }
  }
  return nullptr;
}

}  // namespace talent
