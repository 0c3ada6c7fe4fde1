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

// Chat-completions requests against OpenAI-compatible endpoints.
//
// A request is POSTed to {base_url}/chat/completions as
//
//   {"model":...,"temperature":...,"top_p":...,"max_tokens":...,
//    "messages":[{"role":"system","content":"..."},
//                {"role":"user","content":[{"type":"text","text":...},
//                                          {"type":"image_url",
//                                           "image_url":{"url":...}}]}]}
//
// with the keys in exactly that order. A message whose only part is text
// is sent with string content; anything else uses the array form.

#ifndef TALENT_MODEL_CLIENT_H_
#define TALENT_MODEL_CLIENT_H_

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace talent {

enum class EndpointRole { kVlm, kLlm };

std::string_view ToString(EndpointRole role);
EndpointRole ParseEndpointRole(std::string_view name);

struct EndpointConfig {
  std::string name;
  EndpointRole role = EndpointRole::kLlm;
  std::string base_url;
  std::optional<std::string> api_key;
  std::string model;
  double temperature = 0.1;
  double top_p = 0.9;
  int max_tokens = 2048;
  std::chrono::milliseconds timeout{120'000};
  int max_retries = 3;
  std::optional<int> requests_per_minute;
  std::optional<double> model_size_b;

  // Throws Error(kInvalidArgument) when a field is out of range.
  void Validate() const;
};

enum class MessageRole { kSystem, kUser };

struct ContentPart {
  enum class Kind { kText, kImage };
  Kind kind = Kind::kText;
  std::string value;  // text, or an image data URL

  static ContentPart Text(std::string text) {
    return {Kind::kText, std::move(text)};
  }
  static ContentPart Image(std::string data_url) {
    return {Kind::kImage, std::move(data_url)};
  }
  friend bool operator==(const ContentPart&, const ContentPart&) = default;
};

struct ChatMessage {
  MessageRole role = MessageRole::kUser;
  std::vector<ContentPart> parts;

  static ChatMessage System(std::string text) {
    return {MessageRole::kSystem, {ContentPart::Text(std::move(text))}};
  }
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  EndpointConfig endpoint;
  std::vector<ChatMessage> messages;
};

struct ChatResponse {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  std::chrono::milliseconds latency{0};
  bool from_cache = false;
};

// Throws Error(kInvalidArgument) for empty message lists, empty messages, or
// image parts outside user messages.
void ValidateMessages(const std::vector<ChatMessage>& messages);

// Wire body, bit-exact (see file comment).
std::string SerializeRequestBody(const ChatRequest& request);

// SHA-256 over the canonical JSON of the sampling parameters and messages,
// with image URLs replaced by "sha256:<hash of the URL's base64 payload>".
// The endpoint name, URL and key do not participate.
std::string RequestDigest(const ChatRequest& request);

// First 200 characters of the flattened prompt text; images appear as
// "[image sha256:...]".
std::string PromptSummary(const ChatRequest& request);

// Parses a chat-completions response body. Throws TransportError
// (kUpstream) on malformed JSON or a missing choices[0].message.content.
ChatResponse ParseResponseBody(std::string_view body);

// Moves requests to a backend and back. Implementations throw
// TransportError; retryable failures carry ErrorCode::kRetryable.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual ChatResponse Send(const ChatRequest& request,
                            const std::string& digest) = 0;
};

using TransportHandle = std::shared_ptr<Transport>;

struct RetryPolicy {
  std::chrono::milliseconds base{1000};
  double factor = 2.0;
  std::chrono::milliseconds max_delay{60'000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct Completion {
  ChatResponse response;
  std::string digest;
  int attempts = 0;
};

// Thread-safe front door for model calls: validation, digesting, and retry
// with exponential backoff and full jitter.
class ModelClient {
 public:
  explicit ModelClient(TransportHandle transport, RetryPolicy policy = {},
                       Sleeper sleeper = nullptr, std::uint64_t jitter_seed = 0);

  Completion Complete(const EndpointConfig& endpoint,
                      const std::vector<ChatMessage>& messages);

  // Delay before retry number `retry` (0-based): uniform in
  // [0, min(max_delay, base * factor^retry)].
  std::chrono::milliseconds BackoffDelay(int retry);

  const TransportHandle& transport() const { return transport_; }

 private:
  TransportHandle transport_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
};

}  // namespace talent

#endif  // TALENT_MODEL_CLIENT_H_
