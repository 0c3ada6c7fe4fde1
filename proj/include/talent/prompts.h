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

#ifndef TALENT_PROMPTS_H_
#define TALENT_PROMPTS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace talent {

// Prompt texts for every stage. Stored as data so runs can override them
// from a JSON file with the same five keys.
//
// qa_user_template uses a small mustache subset:
//   {{name}}                 substitutes a slot
//   {{#name}}...{{/name}}    emits the block only when the slot is set
// Slots: narration, ocr, gt_table, question.
struct PromptLibrary {
  std::string ocr_system;
  std::string narration_system;
  std::string direct_system;
  std::string qa_system;
  std::string qa_user_template;

  static PromptLibrary Default();
  // Missing keys fall back to the defaults.
  static PromptLibrary FromJson(std::string_view text);
  static PromptLibrary Load(const std::filesystem::path& path);

  std::string ToJson() const;
  // SHA-256 of ToJson(); echoed into reports.
  std::string Hash() const;

  friend bool operator==(const PromptLibrary&, const PromptLibrary&) = default;
};

struct QaSlots {
  std::optional<std::string> narration;
  std::optional<std::string> ocr;
  std::optional<std::string> gt_table;
  std::string question;
};

// Renders in a single pass, so slot values containing "{{" are copied
// verbatim. Throws Error(kInvalidArgument) for unknown or unset slots
// referenced outside their section, and for unbalanced sections.
std::string RenderTemplate(std::string_view tmpl, const QaSlots& slots);

}  // namespace talent

#endif  // TALENT_PROMPTS_H_
