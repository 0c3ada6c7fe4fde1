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

#include "talent/prompts.h"

#include <vector>

#include "json.hpp"
#include "talent/error.h"
#include "talent/util.h"

namespace talent {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char kOcrSystem[] =
    "You are an expert in table. You will be given a table in the form of a "
    "picture.\n"
    "Your task is to output the table in a markdown format that can be easily "
    "read and understood by humans.\n"
    "You should be careful about the structure of the table. This is very "
    "important to the user. Do not miss any details in the table.\n"
    "You should be careful and be accurate about the boxheads and stubheads "
    "of the table and always include them in the markdown table.\n"
    "If any cell in the table is empty, you should leave it empty in the "
    "markdown table.\n"
    "You should not make up any content.\n"
    "Only output the table in markdown format, do not output any other "
    "content.";

constexpr const char kNarrationSystem[] =
    "You are an expert in table.\n"
    "You will be given a table in the form of a picture.\n"
    "Your task is to describe the content and structure of the table in "
    "details.\n"
    "You should include any relevant table's details and context that may "
    "help the model understand the table.\n"
    "This is very important to the user.";

constexpr const char kDirectSystem[] =
    "Answer the question about the table image.";

constexpr const char kQaSystem[] =
    "You are an expert at answering questions about tables. You will be "
    "given one or more representations of a table followed by a question.\n"
    "Answer in a complete sentence and always include the measurement unit "
    "alongside any numeric value.\n"
    "Answer in fluent natural language rather than with a bare number or "
    "fragment.\n"
    "Ground every value in the table description and headers provided: check "
    "which headers, units and scale notes (such as \"in thousands\" or \"in "
    "millions\") apply to a value before you report it.";

constexpr const char kQaUserTemplate[] =
    "{{#narration}}## Table description\n{{narration}}\n\n{{/narration}}"
    "{{#ocr}}## Table (markdown)\n{{ocr}}\n\n{{/ocr}}"
    "{{#gt_table}}## Table\n{{gt_table}}\n\n{{/gt_table}}"
    "## Question\n{{question}}";

const std::optional<std::string>* SlotValue(const QaSlots& slots,
                                            std::string_view name,
                                            const std::optional<std::string>& q) {
  if (name == "narration") return &slots.narration;
  if (name == "ocr") return &slots.ocr;
  if (name == "gt_table") return &slots.gt_table;
  if (name == "question") return &q;
  return nullptr;
}

[[noreturn]] void TemplateFail(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "prompt template: " + what);
}

}  // namespace

PromptLibrary PromptLibrary::Default() {
  return {kOcrSystem, kNarrationSystem, kDirectSystem, kQaSystem,
          kQaUserTemplate};
}

PromptLibrary PromptLibrary::FromJson(std::string_view text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kParse, "prompt library is not a JSON object");
  }
  PromptLibrary lib = Default();
  auto take = [&](const char* key, std::string& field) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_string()) {
        throw Error(ErrorCode::kParse,
                    std::string("prompt field '") + key + "' must be a string");
      }
      field = it->get<std::string>();
    }
  };
  take("ocr_system", lib.ocr_system);
  take("narration_system", lib.narration_system);
  take("direct_system", lib.direct_system);
  take("qa_system", lib.qa_system);
  take("qa_user_template", lib.qa_user_template);
  // Surface template mistakes at load time rather than mid-run.
  RenderTemplate(lib.qa_user_template, {"n", "o", "g", "q"});
  return lib;
}

PromptLibrary PromptLibrary::Load(const std::filesystem::path& path) {
  return FromJson(ReadFile(path));
}

std::string PromptLibrary::ToJson() const {
  ordered_json j;
  j["ocr_system"] = ocr_system;
  j["narration_system"] = narration_system;
  j["direct_system"] = direct_system;
  j["qa_system"] = qa_system;
  j["qa_user_template"] = qa_user_template;
  return j.dump(2) + "\n";
}

std::string PromptLibrary::Hash() const { return Sha256Hex(ToJson()); }

std::string RenderTemplate(std::string_view tmpl, const QaSlots& slots) {
  const std::optional<std::string> question = slots.question;
  std::string out;
  // Stack of open sections; `emitting` is false inside a skipped section.
  std::vector<std::pair<std::string, bool>> open;
  bool emitting = true;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t start = tmpl.find("{{", pos);
    if (start == std::string_view::npos) {
      if (emitting) out.append(tmpl.substr(pos));
      break;
    }
    if (emitting) out.append(tmpl.substr(pos, start - pos));
    const std::size_t end = tmpl.find("}}", start + 2);
    if (end == std::string_view::npos) TemplateFail("unterminated tag");
    std::string_view tag = tmpl.substr(start + 2, end - start - 2);
    pos = end + 2;

    if (!tag.empty() && (tag[0] == '#' || tag[0] == '/')) {
      const std::string name(tag.substr(1));
      const auto* value = SlotValue(slots, name, question);
      if (value == nullptr) TemplateFail("unknown slot '" + name + "'");
      if (tag[0] == '#') {
        open.emplace_back(name, emitting);
        emitting = emitting && value->has_value();
      } else {
        if (open.empty() || open.back().first != name) {
          TemplateFail("unbalanced section '" + name + "'");
        }
        emitting = open.back().second;
        open.pop_back();
      }
      continue;
    }
    const std::string name(tag);
    const auto* value = SlotValue(slots, name, question);
    if (value == nullptr) TemplateFail("unknown slot '" + name + "'");
    if (!emitting) continue;
    if (!value->has_value()) TemplateFail("slot '" + name + "' is not set");
    out.append(**value);
  }
  if (!open.empty()) TemplateFail("unclosed section '" + open.back().first + "'");
  return out;
}

}  // namespace talent
