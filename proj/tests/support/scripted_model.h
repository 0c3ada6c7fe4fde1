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

// Rule-based stand-in for VLM and LLM endpoints.
//
// A request is reduced to a ScriptView: the stage (from the system prompt),
// the labels of any images (registered up front by payload hash), and the
// user text. The first rule whose conditions all hold supplies the reply.

#ifndef TALENT_TESTS_SUPPORT_SCRIPTED_MODEL_H_
#define TALENT_TESTS_SUPPORT_SCRIPTED_MODEL_H_

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "talent/dataset.h"
#include "talent/imaging.h"
#include "talent/model_client.h"

namespace talent::testing {

struct ScriptRule {
  std::optional<std::string> stage;     // ocr, narration, direct, reason
  std::optional<std::string> image;     // label of an attached image
  std::optional<std::string> contains;  // substring of the user text
  std::string reply;
};

struct ScriptView {
  std::string model;
  std::string stage;  // "unknown" when the system prompt is not a default one
  std::string system;
  std::string user_text;
  std::vector<std::string> images;  // labels, "?" when unregistered
};

class ScriptedModel {
 public:
  ScriptedModel() = default;
  static std::shared_ptr<ScriptedModel> FromFile(const std::filesystem::path& path);

  void AddRule(ScriptRule rule);
  void LabelImage(const std::string& data_url, const std::string& label);
  // Labels every table image as the pipeline will send it at `preset`.
  void LabelManifestImages(const DatasetManifest& manifest,
                           const ResolutionPreset& preset);

  ScriptView ViewOf(const ChatRequest& request) const;
  ScriptView ViewOfBody(const nlohmann::json& body) const;

  // Throws std::runtime_error when no rule matches.
  std::string Reply(const ScriptView& view) const;

 private:
  std::string LabelFor(const std::string& url) const;

  mutable std::mutex mu_;
  std::vector<ScriptRule> rules_;
  std::map<std::string, std::string> labels_;  // payload sha256 -> label
};

// In-process transport over a ScriptedModel that records what it saw.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::shared_ptr<ScriptedModel> model)
      : model_(std::move(model)) {}

  ChatResponse Send(const ChatRequest& request, const std::string& digest) override;

  int calls() const { return calls_.load(); }
  std::vector<ScriptView> views() const;
  std::vector<ChatRequest> requests() const;

 private:
  std::shared_ptr<ScriptedModel> model_;
  std::atomic<int> calls_{0};
  mutable std::mutex mu_;
  std::vector<ScriptView> views_;
  std::vector<ChatRequest> requests_;
};

}  // namespace talent::testing

#endif  // TALENT_TESTS_SUPPORT_SCRIPTED_MODEL_H_
