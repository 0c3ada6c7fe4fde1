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

// Answering strategies as small stage graphs over a VLM and an LLM.
//
//   talent                2 VLM (OCR markdown, narration) + 1 LLM
//   direct_prompt         1 VLM (image + question)
//   perfect_ocr           1 LLM over the ground-truth table text
//   generated_ocr         1 VLM (OCR markdown) + 1 LLM
//   language_description  1 VLM (narration) + 1 LLM
//
// Every VLM exchange is stateless: [system prompt, user: image].

#ifndef TALENT_PIPELINE_H_
#define TALENT_PIPELINE_H_

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "talent/dataset.h"
#include "talent/imaging.h"
#include "talent/model_client.h"
#include "talent/prompts.h"

namespace talent {

enum class StrategyKind {
  kTalent,
  kDirectPrompt,
  kPerfectOcr,
  kGeneratedOcr,
  kLanguageDescription,
};

std::string_view ToString(StrategyKind kind);
StrategyKind ParseStrategy(std::string_view name);
// Row label used in report tables ("TALENT", "Direct Prompt", ...).
std::string_view MethodLabel(StrategyKind kind);
const std::vector<StrategyKind>& AllStrategies();

// Whether the strategy calls the VLM / the LLM at all.
bool UsesVlm(StrategyKind kind);
bool UsesLlm(StrategyKind kind);

struct DualRepresentation {
  std::string ocr_markdown;
  std::string narration;

  friend bool operator==(const DualRepresentation&,
                         const DualRepresentation&) = default;
};

struct StageRecord {
  std::string stage_name;  // "ocr", "narration", "direct" or "reason"
  std::string endpoint_name;
  EndpointRole role = EndpointRole::kLlm;
  std::string digest;
  std::string response_text;
  std::chrono::milliseconds latency{0};
  bool cache_hit = false;
};

struct PipelineTrace {
  std::vector<StageRecord> stages;

  int vlm_calls() const;
  int llm_calls() const;
  void Append(const PipelineTrace& other);

  // {"vlm_calls","llm_calls","stages":[{"stage","endpoint","digest"}]}.
  // Carries no timing or cache state, so it is stable across reruns.
  nlohmann::ordered_json Summary() const;
  // Full record including latency and cache hits.
  nlohmann::ordered_json ToJson() const;
};

struct AnswerResult {
  std::string prediction;
  PipelineTrace trace;
};

struct PipelineOptions {
  // Run the OCR and narration calls of BuildDual in parallel.
  bool concurrent_dual = true;
  // Return a dual representation with one field empty when exactly one of
  // the two VLM calls fails.
  bool allow_partial_dual = false;
};

class Pipeline {
 public:
  Pipeline(std::shared_ptr<ModelClient> client, EndpointConfig vlm,
           EndpointConfig llm, PromptLibrary prompts,
           PipelineOptions options = {});

  std::string ExtractOcr(const ImageBuffer& image, PipelineTrace* trace) const;
  std::string ExtractNarration(const ImageBuffer& image,
                               PipelineTrace* trace) const;
  DualRepresentation BuildDual(const ImageBuffer& image,
                               PipelineTrace* trace) const;

  // The LLM reasoning stage over whichever representations `slots` holds.
  std::string Reason(const QaSlots& slots, PipelineTrace* trace) const;

  // Exactly the representations `strategy` feeds its LLM. Throws
  // Error(kInvalidArgument) for direct_prompt, which has no LLM stage.
  static QaSlots SlotsFor(StrategyKind strategy, const DualRepresentation& dual,
                          const std::optional<std::string>& gt_table,
                          const std::string& question);

  // Messages sent to the LLM for `slots`.
  std::vector<ChatMessage> ReasoningMessages(const QaSlots& slots) const;

  // Runs a whole strategy for one benchmark item. The image is loaded from
  // table.image_file and resized to `resolution` (not loaded for
  // perfect_ocr). Errors are annotated with the failing stage.
  AnswerResult Answer(StrategyKind strategy, const TableRecord& table,
                      const QAPair& qa,
                      const ResolutionPreset& resolution) const;

  // Same, for an already prepared image (one-shot CLI use).
  AnswerResult AnswerImage(StrategyKind strategy, const ImageBuffer& image,
                           const std::optional<std::string>& gt_table,
                           const std::string& question) const;

  const EndpointConfig& vlm() const { return vlm_; }
  const EndpointConfig& llm() const { return llm_; }
  const PromptLibrary& prompts() const { return prompts_; }

 private:
  std::string VlmStage(std::string_view stage, const std::string& system,
                       std::vector<ContentPart> user_parts,
                       PipelineTrace* trace) const;
  DualRepresentation BuildDualFromUrl(const std::string& data_url,
                                      PipelineTrace* trace) const;
  AnswerResult Run(StrategyKind strategy, const std::string* data_url,
                   const std::optional<std::string>& gt_table,
                   const std::string& question) const;

  std::shared_ptr<ModelClient> client_;
  EndpointConfig vlm_;
  EndpointConfig llm_;
  PromptLibrary prompts_;
  PipelineOptions options_;
};

}  // namespace talent

#endif  // TALENT_PIPELINE_H_
