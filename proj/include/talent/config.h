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

// Run configuration. Settings are flat kebab-case keys ("vlm-base-url",
// "match-policy", ...) layered as
//
//   defaults < --config JSON file < TALENT_* environment < command-line flags
//
// The environment variable for a key is TALENT_ plus the key upper-cased
// with '-' replaced by '_' (TALENT_LLM_BASE_URL).

#ifndef TALENT_CONFIG_H_
#define TALENT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "talent/dataset.h"
#include "talent/eval.h"
#include "talent/imaging.h"
#include "talent/model_client.h"
#include "talent/pipeline.h"
#include "talent/transport.h"

namespace talent {

struct RunConfig {
  std::filesystem::path manifest;
  std::vector<StrategyKind> strategies{StrategyKind::kTalent};
  EndpointConfig vlm;
  EndpointConfig llm;
  ResolutionPreset resolution;
  MatchPolicy policy;
  int concurrency = 4;
  std::optional<std::filesystem::path> cache_dir;
  std::string transport = "live";
  std::filesystem::path fixtures_dir;
  std::filesystem::path output_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> limit;
  std::vector<std::string> categories;
  std::vector<std::string> qa_ids;
  bool fail_fast = false;
  std::optional<std::filesystem::path> prompts;
  bool concurrent_dual = true;

  RunConfig();

  // Throws Error(kInvalidArgument) naming the offending key.
  void Validate() const;
  TransportMode transport_mode() const;
  SelectionFilter selection() const;
};

// Every recognised key, in echo order.
const std::vector<std::string>& ConfigKeys();

// Sets one key. Strings are accepted for every type ("0.1", "true",
// "talent,perfect_ocr"); JSON numbers, booleans and arrays where natural.
// Throws Error(kInvalidArgument) for unknown keys or bad values.
void ApplySetting(RunConfig& config, std::string_view key,
                  const nlohmann::json& value);

// Applies every member of a JSON object. Keys may also use '_' for '-'.
void ApplyJson(RunConfig& config, const nlohmann::json& object,
               std::string_view origin);
void ApplyConfigFile(RunConfig& config, const std::filesystem::path& path);

// TALENT_* variables that name a known key, as key -> value.
std::map<std::string, std::string> SettingsFromEnvironment(char** envp);

// Resolves all layers. `flags` are applied last, in order.
RunConfig ResolveConfig(
    const std::optional<std::filesystem::path>& config_file,
    const std::map<std::string, std::string>& env,
    const std::vector<std::pair<std::string, std::string>>& flags);

// Effective configuration as flat keys. API keys are redacted.
nlohmann::ordered_json EffectiveConfig(const RunConfig& config);

// perfect_ocr needs gt_table_text on every selected item. Throws
// Error(kPrecondition) listing the offending tables.
void CheckStrategiesAgainstItems(const RunConfig& config,
                                 const std::vector<SelectedItem>& items);

}  // namespace talent

#endif  // TALENT_CONFIG_H_
