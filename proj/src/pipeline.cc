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

#include "talent/pipeline.h"

#include <future>

#include "talent/error.h"

namespace talent {

using ordered_json = nlohmann::ordered_json;

namespace {

struct StrategyName {
  StrategyKind kind;
  std::string_view wire;
  std::string_view label;
};

constexpr StrategyName kStrategyNames[] = {
    {StrategyKind::kTalent, "talent", "TALENT"},
    {StrategyKind::kDirectPrompt, "direct_prompt", "Direct Prompt"},
    {StrategyKind::kPerfectOcr, "perfect_ocr", "Perfect OCR"},
    {StrategyKind::kGeneratedOcr, "generated_ocr", "VLM Generated OCR"},
    {StrategyKind::kLanguageDescription, "language_description",
     "Language Description"},
};

Error Annotate(std::string_view stage, const Error& e) {
  return Error(e.code(), "stage '" + std::string(stage) + "': " + e.what());
}

// Issues one model call and records it. Errors are annotated with `stage`.
std::string CallStage(ModelClient& client, const EndpointConfig& endpoint,
                      std::string_view stage,
                      const std::vector<ChatMessage>& messages,
                      PipelineTrace* trace) {
  Completion c;
  try {
    c = client.Complete(endpoint, messages);
  } catch (const Error& e) {
    throw Annotate(stage, e);
  }
  if (c.response.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kEmptyCompletion,
                "stage '" + std::string(stage) + "': endpoint '" +
                    endpoint.name + "' returned an empty completion");
  }
  if (trace != nullptr) {
    trace->stages.push_back({std::string(stage), endpoint.name, endpoint.role,
                             c.digest, c.response.text, c.response.latency,
                             c.response.from_cache});
  }
  return std::move(c.response.text);
}

}  // namespace

std::string_view ToString(StrategyKind kind) {
  for (const auto& s : kStrategyNames) {
    if (s.kind == kind) return s.wire;
  }
  return "talent";
}

StrategyKind ParseStrategy(std::string_view name) {
  for (const auto& s : kStrategyNames) {
    if (s.wire == name) return s.kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown strategy '" + std::string(name) + "'");
}

std::string_view MethodLabel(StrategyKind kind) {
  for (const auto& s : kStrategyNames) {
    if (s.kind == kind) return s.label;
  }
  return "";
}

const std::vector<StrategyKind>& AllStrategies() {
  static const std::vector<StrategyKind> kAll = {
      StrategyKind::kDirectPrompt, StrategyKind::kPerfectOcr,
      StrategyKind::kGeneratedOcr, StrategyKind::kLanguageDescription,
      StrategyKind::kTalent};
  return kAll;
}

bool UsesVlm(StrategyKind kind) { return kind != StrategyKind::kPerfectOcr; }
bool UsesLlm(StrategyKind kind) { return kind != StrategyKind::kDirectPrompt; }

int PipelineTrace::vlm_calls() const {
  int n = 0;
  for (const auto& s : stages) n += s.role == EndpointRole::kVlm;
  return n;
}

int PipelineTrace::llm_calls() const {
  int n = 0;
  for (const auto& s : stages) n += s.role == EndpointRole::kLlm;
  return n;
}

void PipelineTrace::Append(const PipelineTrace& other) {
  stages.insert(stages.end(), other.stages.begin(), other.stages.end());
}

ordered_json PipelineTrace::Summary() const {
  ordered_json j;
  j["vlm_calls"] = vlm_calls();
  j["llm_calls"] = llm_calls();
  ordered_json stage_list = ordered_json::array();
  for (const auto& s : stages) {
    ordered_json st;
    st["stage"] = s.stage_name;
    st["endpoint"] = s.endpoint_name;
    st["digest"] = s.digest;
    stage_list.push_back(std::move(st));
  }
  j["stages"] = std::move(stage_list);
  return j;
}

ordered_json PipelineTrace::ToJson() const {
  ordered_json j;
  j["vlm_calls"] = vlm_calls();
  j["llm_calls"] = llm_calls();
  ordered_json stage_list = ordered_json::array();
  for (const auto& s : stages) {
    ordered_json st;
    st["stage"] = s.stage_name;
    st["endpoint"] = s.endpoint_name;
    st["role"] = ToString(s.role);
    st["digest"] = s.digest;
    st["latency_ms"] = s.latency.count();
    st["cache_hit"] = s.cache_hit;
    st["response"] = s.response_text;
    stage_list.push_back(std::move(st));
  }
  j["stages"] = std::move(stage_list);
  return j;
}

Pipeline::Pipeline(std::shared_ptr<ModelClient> client, EndpointConfig vlm,
                   EndpointConfig llm, PromptLibrary prompts,
                   PipelineOptions options)
    : client_(std::move(client)),
      vlm_(std::move(vlm)),
      llm_(std::move(llm)),
      prompts_(std::move(prompts)),
      options_(options) {
  vlm_.role = EndpointRole::kVlm;
  llm_.role = EndpointRole::kLlm;
}

std::string Pipeline::VlmStage(std::string_view stage,
                               const std::string& system,
                               std::vector<ContentPart> user_parts,
                               PipelineTrace* trace) const {
  std::vector<ChatMessage> messages = {
      ChatMessage::System(system),
      ChatMessage{MessageRole::kUser, std::move(user_parts)}};
  return CallStage(*client_, vlm_, stage, messages, trace);
}

std::string Pipeline::ExtractOcr(const ImageBuffer& image,
                                 PipelineTrace* trace) const {
  return VlmStage("ocr", prompts_.ocr_system,
                  {ContentPart::Image(ToDataUrl(image))}, trace);
}

std::string Pipeline::ExtractNarration(const ImageBuffer& image,
                                       PipelineTrace* trace) const {
  return VlmStage("narration", prompts_.narration_system,
                  {ContentPart::Image(ToDataUrl(image))}, trace);
}

DualRepresentation Pipeline::BuildDual(const ImageBuffer& image,
                                       PipelineTrace* trace) const {
  return BuildDualFromUrl(ToDataUrl(image), trace);
}

DualRepresentation Pipeline::BuildDualFromUrl(const std::string& data_url,
                                              PipelineTrace* trace) const {
  // Each half records into its own trace; they are merged OCR-first so the
  // result does not depend on completion order.
  PipelineTrace ocr_trace;
  PipelineTrace narr_trace;
  auto ocr_call = [&] {
    return VlmStage("ocr", prompts_.ocr_system,
                    {ContentPart::Image(data_url)}, &ocr_trace);
  };
  auto narr_call = [&] {
    return VlmStage("narration", prompts_.narration_system,
                    {ContentPart::Image(data_url)}, &narr_trace);
  };

  std::optional<std::string> ocr, narration;
  std::optional<Error> ocr_error, narr_error;
  auto capture = [](auto&& fn, std::optional<std::string>& out,
                    std::optional<Error>& err) {
    try {
      out = fn();
    } catch (const Error& e) {
      err = e;
    }
  };
  if (options_.concurrent_dual) {
    auto narr_future = std::async(std::launch::async, [&] {
      capture(narr_call, narration, narr_error);
    });
    capture(ocr_call, ocr, ocr_error);
    narr_future.get();
  } else {
    capture(ocr_call, ocr, ocr_error);
    if (!ocr_error || options_.allow_partial_dual) {
      capture(narr_call, narration, narr_error);
    }
  }

  if (trace != nullptr) {
    trace->Append(ocr_trace);
    trace->Append(narr_trace);
  }
  if (ocr_error && (narr_error || !options_.allow_partial_dual)) throw *ocr_error;
  if (narr_error && (ocr_error || !options_.allow_partial_dual)) throw *narr_error;
  return {ocr.value_or(""), narration.value_or("")};
}

QaSlots Pipeline::SlotsFor(StrategyKind strategy,
                           const DualRepresentation& dual,
                           const std::optional<std::string>& gt_table,
                           const std::string& question) {
  QaSlots slots;
  slots.question = question;
  switch (strategy) {
    case StrategyKind::kTalent:
      slots.narration = dual.narration;
      slots.ocr = dual.ocr_markdown;
      break;
    case StrategyKind::kGeneratedOcr:
      slots.ocr = dual.ocr_markdown;
      break;
    case StrategyKind::kLanguageDescription:
      slots.narration = dual.narration;
      break;
    case StrategyKind::kPerfectOcr:
      slots.gt_table = gt_table;
      break;
    case StrategyKind::kDirectPrompt:
      throw Error(ErrorCode::kInvalidArgument,
                  "direct_prompt has no reasoning stage");
  }
  return slots;
}

std::vector<ChatMessage> Pipeline::ReasoningMessages(const QaSlots& slots) const {
  return {ChatMessage::System(prompts_.qa_system),
          ChatMessage{MessageRole::kUser,
                      {ContentPart::Text(
                          RenderTemplate(prompts_.qa_user_template, slots))}}};
}

std::string Pipeline::Reason(const QaSlots& slots, PipelineTrace* trace) const {
  std::vector<ChatMessage> messages;
  try {
    messages = ReasoningMessages(slots);
  } catch (const Error& e) {
    throw Annotate("reason", e);
  }
  return CallStage(*client_, llm_, "reason", messages, trace);
}

AnswerResult Pipeline::Run(StrategyKind strategy, const std::string* data_url,
                           const std::optional<std::string>& gt_table,
                           const std::string& question) const {
  AnswerResult result;
  PipelineTrace* trace = &result.trace;
  DualRepresentation dual;
  switch (strategy) {
    case StrategyKind::kDirectPrompt:
      result.prediction =
          VlmStage("direct", prompts_.direct_system,
                   {ContentPart::Image(*data_url), ContentPart::Text(question)},
                   trace);
      return result;
    case StrategyKind::kTalent:
      dual = BuildDualFromUrl(*data_url, trace);
      break;
    case StrategyKind::kGeneratedOcr:
      dual.ocr_markdown = VlmStage("ocr", prompts_.ocr_system,
                                   {ContentPart::Image(*data_url)}, trace);
      break;
    case StrategyKind::kLanguageDescription:
      dual.narration = VlmStage("narration", prompts_.narration_system,
                                {ContentPart::Image(*data_url)}, trace);
      break;
    case StrategyKind::kPerfectOcr:
      break;
  }
  result.prediction = Reason(SlotsFor(strategy, dual, gt_table, question), trace);
  return result;
}

AnswerResult Pipeline::Answer(StrategyKind strategy, const TableRecord& table,
                              const QAPair& qa,
                              const ResolutionPreset& resolution) const {
  if (strategy == StrategyKind::kPerfectOcr) {
    if (!table.gt_table_text) {
      throw Error(ErrorCode::kPrecondition,
                  "perfect_ocr needs gt_table_text, which table '" +
                      table.table_id + "' does not have");
    }
    return Run(strategy, nullptr, table.gt_table_text, qa.question);
  }
  std::string data_url;
  try {
    data_url = ToDataUrl(ResizeToPreset(LoadImage(table.image_file), resolution));
  } catch (const Error& e) {
    throw Annotate("image", e);
  }
  return Run(strategy, &data_url, table.gt_table_text, qa.question);
}

AnswerResult Pipeline::AnswerImage(StrategyKind strategy,
                                   const ImageBuffer& image,
                                   const std::optional<std::string>& gt_table,
                                   const std::string& question) const {
  if (strategy == StrategyKind::kPerfectOcr) {
    if (!gt_table) {
      throw Error(ErrorCode::kPrecondition, "perfect_ocr needs a ground-truth table");
    }
    return Run(strategy, nullptr, gt_table, question);
  }
  const std::string data_url = ToDataUrl(image);
  return Run(strategy, &data_url, gt_table, question);
}

}  // namespace talent
