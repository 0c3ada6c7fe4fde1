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

#include "talent/model_client.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "talent/error.h"
#include "talent/util.h"

namespace talent {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string_view RoleName(MessageRole role) {
  return role == MessageRole::kSystem ? "system" : "user";
}

// Hash of the base64 payload of a data URL (everything after the first
// comma); plain URLs are hashed whole.
std::string ImagePayloadHash(std::string_view url) {
  auto comma = url.find(',');
  std::string_view payload =
      comma == std::string_view::npos ? url : url.substr(comma + 1);
  return "sha256:" + Sha256Hex(payload);
}

template <typename Json>
Json MessageContent(const ChatMessage& m, bool hash_images) {
  if (m.parts.size() == 1 && m.parts[0].kind == ContentPart::Kind::kText) {
    return Json(m.parts[0].value);
  }
  Json content = Json::array();
  for (const auto& part : m.parts) {
    Json p = Json::object();
    if (part.kind == ContentPart::Kind::kText) {
      p["type"] = "text";
      p["text"] = part.value;
    } else {
      p["type"] = "image_url";
      Json url = Json::object();
      url["url"] = hash_images ? ImagePayloadHash(part.value) : part.value;
      p["image_url"] = std::move(url);
    }
    content.push_back(std::move(p));
  }
  return content;
}

template <typename Json>
Json RequestJson(const ChatRequest& request, bool hash_images) {
  const auto& e = request.endpoint;
  Json body = Json::object();
  body["model"] = e.model;
  body["temperature"] = e.temperature;
  body["top_p"] = e.top_p;
  body["max_tokens"] = e.max_tokens;
  Json messages = Json::array();
  for (const auto& m : request.messages) {
    Json msg = Json::object();
    msg["role"] = RoleName(m.role);
    msg["content"] = MessageContent<Json>(m, hash_images);
    messages.push_back(std::move(msg));
  }
  body["messages"] = std::move(messages);
  return body;
}

std::string Excerpt(std::string_view body, std::size_t n = 300) {
  if (body.size() <= n) return std::string(body);
  return std::string(body.substr(0, n)) + "...";
}

}  // namespace

std::string_view ToString(EndpointRole role) {
  return role == EndpointRole::kVlm ? "vlm" : "llm";
}

EndpointRole ParseEndpointRole(std::string_view name) {
  if (name == "vlm") return EndpointRole::kVlm;
  if (name == "llm") return EndpointRole::kLlm;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown endpoint role '" + std::string(name) + "'");
}

void EndpointConfig::Validate() const {
  auto fail = [this](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint '" + name + "': " + what);
  };
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    fail("temperature must be within [0, 2]");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) fail("top_p must be within (0, 1]");
  if (max_tokens < 1) fail("max_tokens must be >= 1");
  if (max_retries < 0) fail("max_retries must be >= 0");
  if (requests_per_minute && *requests_per_minute < 1) {
    fail("requests_per_minute must be positive");
  }
  if (model.empty()) fail("model is required");
}

void ValidateMessages(const std::vector<ChatMessage>& messages) {
  if (messages.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "request has no messages");
  }
  for (const auto& m : messages) {
    if (m.parts.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "message has no parts");
    }
    for (const auto& p : m.parts) {
      if (p.kind == ContentPart::Kind::kImage && m.role != MessageRole::kUser) {
        throw Error(ErrorCode::kInvalidArgument,
                    "image parts are only allowed in user messages");
      }
    }
  }
}

std::string SerializeRequestBody(const ChatRequest& request) {
  return RequestJson<ordered_json>(request, /*hash_images=*/false).dump();
}

std::string RequestDigest(const ChatRequest& request) {
  // nlohmann::json keeps object keys sorted, which canonicalises the form.
  return Sha256Hex(RequestJson<json>(request, /*hash_images=*/true).dump());
}

std::string PromptSummary(const ChatRequest& request) {
  std::string flat;
  for (const auto& m : request.messages) {
    if (!flat.empty()) flat += "\n";
    flat += std::string(RoleName(m.role)) + ": ";
    for (const auto& p : m.parts) {
      if (p.kind == ContentPart::Kind::kText) {
        flat += p.value;
      } else {
        flat += "[image " + ImagePayloadHash(p.value) + "]";
      }
      flat += " ";
    }
    if (flat.size() >= 200) break;
  }
  // Cut on a UTF-8 boundary at or below 200 bytes.
  if (flat.size() > 200) {
    std::size_t cut = 200;
    while (cut > 0 && (static_cast<unsigned char>(flat[cut]) & 0xC0) == 0x80) {
      --cut;
    }
    flat.resize(cut);
  }
  return flat;
}

ChatResponse ParseResponseBody(std::string_view body) {
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw TransportError(ErrorCode::kUpstream, 200,
                         "malformed response JSON: " + Excerpt(body));
  }
  ChatResponse r;
  try {
    const json& content = doc.at("choices").at(0).at("message").at("content");
    r.text = content.is_null() ? "" : content.get<std::string>();
  } catch (const json::exception&) {
    throw TransportError(ErrorCode::kUpstream, 200,
                         "response lacks choices[0].message.content: " +
                             Excerpt(body));
  }
  if (auto it = doc.find("usage"); it != doc.end() && it->is_object()) {
    r.prompt_tokens = it->value("prompt_tokens", 0);
    r.completion_tokens = it->value("completion_tokens", 0);
  }
  return r;
}

ModelClient::ModelClient(TransportHandle transport, RetryPolicy policy,
                         Sleeper sleeper, std::uint64_t jitter_seed)
    : transport_(std::move(transport)),
      policy_(policy),
      sleeper_(std::move(sleeper)),
      rng_(jitter_seed) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::chrono::milliseconds ModelClient::BackoffDelay(int retry) {
  const double cap = std::min<double>(
      static_cast<double>(policy_.max_delay.count()),
      static_cast<double>(policy_.base.count()) * std::pow(policy_.factor, retry));
  std::lock_guard<std::mutex> lock(rng_mu_);
  std::uniform_real_distribution<double> dist(0.0, cap);
  return std::chrono::milliseconds(static_cast<long long>(dist(rng_)));
}

Completion ModelClient::Complete(const EndpointConfig& endpoint,
                                 const std::vector<ChatMessage>& messages) {
  endpoint.Validate();
  ValidateMessages(messages);
  ChatRequest request{endpoint, messages};
  Completion out;
  out.digest = RequestDigest(request);
  for (int retry = 0;; ++retry) {
    ++out.attempts;
    try {
      out.response = transport_->Send(request, out.digest);
      return out;
    } catch (const TransportError& e) {
      if (!e.retryable()) throw;
      if (retry >= endpoint.max_retries) {
        throw TransportError(
            ErrorCode::kRetriesExhausted, e.status(),
            "endpoint '" + endpoint.name + "': gave up after " +
                std::to_string(out.attempts) + " attempts: " + e.what());
      }
      sleeper_(BackoffDelay(retry));
    }
  }
}

}  // namespace talent
