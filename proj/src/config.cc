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

#include "talent/config.h"

#include <algorithm>
#include <cstring>
#include <functional>
#include <set>

#include "talent/error.h"
#include "talent/util.h"

namespace talent {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void Bad(std::string_view key, const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument,
              "config '" + std::string(key) + "': " + what);
}

std::string AsString(std::string_view key, const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  Bad(key, "expected a string");
}

bool IsUnset(const json& v) {
  return v.is_null() || (v.is_string() && v.get<std::string>().empty());
}

double AsDouble(std::string_view key, const json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = AsString(key, v);
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) Bad(key, "not a number: '" + s + "'");
  return d;
}

long long AsInt(std::string_view key, const json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  const std::string s = AsString(key, v);
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) Bad(key, "not an integer: '" + s + "'");
  return n;
}

bool AsBool(std::string_view key, const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  const std::string s = AsString(key, v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  Bad(key, "not a boolean: '" + s + "'");
}

std::vector<std::string> AsList(std::string_view key, const json& v) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(AsString(key, e));
    return out;
  }
  const std::string s = AsString(key, v);
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(start, comma - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

// Rethrows library errors under the key's name.
template <typename F>
void Guard(std::string_view key, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    Bad(key, e.what());
  }
}

using Setter = std::function<void(RunConfig&, std::string_view, const json&)>;

void AddEndpointKeys(std::map<std::string, Setter>& m, const std::string& prefix,
                     EndpointConfig RunConfig::*member) {
  m[prefix + "-name"] = [member](RunConfig& c, auto k, const json& v) {
    (c.*member).name = AsString(k, v);
  };
  m[prefix + "-base-url"] = [member](RunConfig& c, auto k, const json& v) {
    (c.*member).base_url = AsString(k, v);
  };
  m[prefix + "-api-key"] = [member](RunConfig& c, auto k, const json& v) {
    if (IsUnset(v)) {
      (c.*member).api_key.reset();
    } else {
      (c.*member).api_key = AsString(k, v);
    }
  };
  m[prefix + "-model"] = [member](RunConfig& c, auto k, const json& v) {
    (c.*member).model = AsString(k, v);
  };
  m[prefix + "-temperature"] = [member](RunConfig& c, auto k, const json& v) {
    (c.*member).temperature = AsDouble(k, v);
  };
  m[prefix + "-top-p"] = [member](RunConfig& c, auto k, const json& v) {
    (c.*member).top_p = AsDouble(k, v);
  };
  m[prefix + "-max-tokens"] = [member](RunConfig& c, auto k, const json& v) {
    (c.*member).max_tokens = static_cast<int>(AsInt(k, v));
  };
  m[prefix + "-timeout-ms"] = [member](RunConfig& c, auto k, const json& v) {
    (c.*member).timeout = std::chrono::milliseconds(AsInt(k, v));
  };
  m[prefix + "-max-retries"] = [member](RunConfig& c, auto k, const json& v) {
    (c.*member).max_retries = static_cast<int>(AsInt(k, v));
  };
  m[prefix + "-requests-per-minute"] = [member](RunConfig& c, auto k,
                                                const json& v) {
    if (IsUnset(v)) {
      (c.*member).requests_per_minute.reset();
    } else {
      (c.*member).requests_per_minute = static_cast<int>(AsInt(k, v));
    }
  };
  m[prefix + "-model-size-b"] = [member](RunConfig& c, auto k, const json& v) {
    if (IsUnset(v)) {
      (c.*member).model_size_b.reset();
    } else {
      (c.*member).model_size_b = AsDouble(k, v);
    }
  };
}

const std::map<std::string, Setter>& Setters() {
  static const auto* setters = [] {
    auto* m = new std::map<std::string, Setter>;
    auto& s = *m;
    s["manifest"] = [](RunConfig& c, auto k, const json& v) {
      c.manifest = AsString(k, v);
    };
    s["strategies"] = [](RunConfig& c, auto k, const json& v) {
      std::vector<StrategyKind> out;
      for (const auto& name : AsList(k, v)) {
        Guard(k, [&] {
          StrategyKind kind = ParseStrategy(name);
          if (std::find(out.begin(), out.end(), kind) == out.end()) {
            out.push_back(kind);
          }
        });
      }
      if (out.empty()) Bad(k, "at least one strategy is required");
      c.strategies = std::move(out);
    };
    AddEndpointKeys(s, "vlm", &RunConfig::vlm);
    AddEndpointKeys(s, "llm", &RunConfig::llm);
    s["temperature"] = [](RunConfig& c, auto k, const json& v) {
      c.vlm.temperature = c.llm.temperature = AsDouble(k, v);
    };
    s["top-p"] = [](RunConfig& c, auto k, const json& v) {
      c.vlm.top_p = c.llm.top_p = AsDouble(k, v);
    };
    s["resolution"] = [](RunConfig& c, auto k, const json& v) {
      Guard(k, [&] {
        ResolutionPreset p = ParseResolution(AsString(k, v));
        c.resolution.target = p.target;
      });
    };
    s["allow-upscale"] = [](RunConfig& c, auto k, const json& v) {
      c.resolution.allow_upscale = AsBool(k, v);
    };
    s["pad-to-square"] = [](RunConfig& c, auto k, const json& v) {
      c.resolution.pad_to_square = AsBool(k, v);
    };
    s["match-policy"] = [](RunConfig& c, auto k, const json& v) {
      Guard(k, [&] { c.policy.mode = ParseMatchMode(AsString(k, v)); });
    };
    s["numeric-rel-tol"] = [](RunConfig& c, auto k, const json& v) {
      c.policy.numeric_rel_tol = AsDouble(k, v);
    };
    s["expand-unit-words"] = [](RunConfig& c, auto k, const json& v) {
      c.policy.expand_unit_words = AsBool(k, v);
    };
    s["concurrency"] = [](RunConfig& c, auto k, const json& v) {
      c.concurrency = static_cast<int>(AsInt(k, v));
    };
    s["cache-dir"] = [](RunConfig& c, auto k, const json& v) {
      if (IsUnset(v)) {
        c.cache_dir.reset();
      } else {
        c.cache_dir = AsString(k, v);
      }
    };
    s["transport"] = [](RunConfig& c, auto k, const json& v) {
      c.transport = AsString(k, v);
    };
    s["fixtures-dir"] = [](RunConfig& c, auto k, const json& v) {
      c.fixtures_dir = AsString(k, v);
    };
    s["output-dir"] = [](RunConfig& c, auto k, const json& v) {
      c.output_dir = AsString(k, v);
    };
    s["seed"] = [](RunConfig& c, auto k, const json& v) {
      if (IsUnset(v)) {
        c.seed.reset();
      } else {
        const long long n = AsInt(k, v);
        if (n < 0) Bad(k, "must be non-negative");
        c.seed = static_cast<std::uint64_t>(n);
      }
    };
    s["limit"] = [](RunConfig& c, auto k, const json& v) {
      if (IsUnset(v)) {
        c.limit.reset();
      } else {
        const long long n = AsInt(k, v);
        if (n < 1) Bad(k, "must be positive");
        c.limit = static_cast<std::size_t>(n);
      }
    };
    s["categories"] = [](RunConfig& c, auto k, const json& v) {
      c.categories = AsList(k, v);
    };
    s["qa-ids"] = [](RunConfig& c, auto k, const json& v) {
      c.qa_ids = AsList(k, v);
    };
    s["fail-fast"] = [](RunConfig& c, auto k, const json& v) {
      c.fail_fast = AsBool(k, v);
    };
    s["prompts"] = [](RunConfig& c, auto k, const json& v) {
      if (IsUnset(v)) {
        c.prompts.reset();
      } else {
        c.prompts = AsString(k, v);
      }
    };
    s["concurrent-dual"] = [](RunConfig& c, auto k, const json& v) {
      c.concurrent_dual = AsBool(k, v);
    };
    return m;
  }();
  return *setters;
}

std::string Canonical(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

ordered_json EndpointEchoJson(const EndpointConfig& e) {
  ordered_json j;
  j["name"] = e.name;
  j["base-url"] = e.base_url;
  j["api-key"] = e.api_key ? ordered_json("<redacted>") : ordered_json(nullptr);
  j["model"] = e.model;
  j["temperature"] = e.temperature;
  j["top-p"] = e.top_p;
  j["max-tokens"] = e.max_tokens;
  j["timeout-ms"] = e.timeout.count();
  j["max-retries"] = e.max_retries;
  j["requests-per-minute"] =
      e.requests_per_minute ? ordered_json(*e.requests_per_minute) : ordered_json(nullptr);
  j["model-size-b"] =
      e.model_size_b ? ordered_json(*e.model_size_b) : ordered_json(nullptr);
  return j;
}

}  // namespace

RunConfig::RunConfig() {
  vlm.name = "vlm";
  vlm.role = EndpointRole::kVlm;
  llm.name = "llm";
  llm.role = EndpointRole::kLlm;
}

void RunConfig::Validate() const {
  if (concurrency < 1) Bad("concurrency", "must be >= 1");
  if (strategies.empty()) Bad("strategies", "at least one strategy is required");
  Guard("match-policy", [&] { policy.Validate(); });
  const bool needs_vlm = std::any_of(strategies.begin(), strategies.end(), UsesVlm);
  const bool needs_llm = std::any_of(strategies.begin(), strategies.end(), UsesLlm);
  const TransportMode mode = transport_mode();
  auto check = [&](const EndpointConfig& e, const char* prefix) {
    Guard(std::string(prefix) + "-model", [&] { e.Validate(); });
    if (mode.kind != TransportMode::Kind::kReplay && e.base_url.empty()) {
      Bad(std::string(prefix) + "-base-url",
          "required for " + std::string(ToString(mode.kind)) + " transport");
    }
  };
  if (needs_vlm) check(vlm, "vlm");
  if (needs_llm) check(llm, "llm");
}

TransportMode RunConfig::transport_mode() const {
  TransportMode mode;
  Guard("transport", [&] { mode = TransportMode::Parse(transport, fixtures_dir); });
  return mode;
}

SelectionFilter RunConfig::selection() const {
  return {categories, qa_ids, limit, seed};
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : Setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void ApplySetting(RunConfig& config, std::string_view key, const json& value) {
  const std::string k = Canonical(key);
  auto it = Setters().find(k);
  if (it == Setters().end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + k + "'");
  }
  it->second(config, k, value);
}

void ApplyJson(RunConfig& config, const json& object, std::string_view origin) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(origin) + ": config must be a JSON object");
  }
  for (const auto& [k, v] : object.items()) {
    try {
      ApplySetting(config, k, v);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(origin) + ": " + e.what());
    }
  }
}

void ApplyConfigFile(RunConfig& config, const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kParse, path.string() + ": invalid JSON");
  }
  ApplyJson(config, j, path.string());
}

std::map<std::string, std::string> SettingsFromEnvironment(char** envp) {
  std::map<std::string, std::string> out;
  if (envp == nullptr) return out;
  for (char** e = envp; *e != nullptr; ++e) {
    std::string_view entry(*e);
    if (entry.rfind("TALENT_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key(entry.substr(7, eq - 7));
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) {
      return ch == '_' ? '-' : static_cast<char>(std::tolower(ch));
    });
    if (Setters().count(key) == 0) continue;
    out[key] = std::string(entry.substr(eq + 1));
  }
  return out;
}

RunConfig ResolveConfig(
    const std::optional<std::filesystem::path>& config_file,
    const std::map<std::string, std::string>& env,
    const std::vector<std::pair<std::string, std::string>>& flags) {
  RunConfig config;
  if (config_file) ApplyConfigFile(config, *config_file);
  // Shared sampling keys go first so per-endpoint keys of the same layer win.
  auto ordered = [](const auto& settings, auto&& apply) {
    for (const auto& [k, v] : settings) {
      if (k == "temperature" || k == "top-p") apply(k, v);
    }
    for (const auto& [k, v] : settings) {
      if (k != "temperature" && k != "top-p") apply(k, v);
    }
  };
  auto apply = [&](const std::string& k, const std::string& v) {
    ApplySetting(config, k, v);
  };
  ordered(env, apply);
  ordered(flags, apply);
  return config;
}

ordered_json EffectiveConfig(const RunConfig& c) {
  ordered_json j;
  j["manifest"] = c.manifest.string();
  ordered_json strategies = ordered_json::array();
  for (StrategyKind s : c.strategies) strategies.push_back(ToString(s));
  j["strategies"] = std::move(strategies);
  j["vlm"] = EndpointEchoJson(c.vlm);
  j["llm"] = EndpointEchoJson(c.llm);
  j["resolution"] = ToString(c.resolution.target);
  j["allow-upscale"] = c.resolution.allow_upscale;
  j["pad-to-square"] = c.resolution.pad_to_square;
  j["match-policy"] = ToString(c.policy.mode);
  j["numeric-rel-tol"] = c.policy.numeric_rel_tol;
  j["expand-unit-words"] = c.policy.expand_unit_words;
  j["concurrency"] = c.concurrency;
  j["cache-dir"] = c.cache_dir ? ordered_json(c.cache_dir->string()) : ordered_json(nullptr);
  j["transport"] = c.transport;
  j["fixtures-dir"] = c.fixtures_dir.string();
  j["output-dir"] = c.output_dir.string();
  j["seed"] = c.seed ? ordered_json(*c.seed) : ordered_json(nullptr);
  j["limit"] = c.limit ? ordered_json(*c.limit) : ordered_json(nullptr);
  j["categories"] = c.categories;
  j["qa-ids"] = c.qa_ids;
  j["fail-fast"] = c.fail_fast;
  j["prompts"] = c.prompts ? ordered_json(c.prompts->string()) : ordered_json(nullptr);
  j["concurrent-dual"] = c.concurrent_dual;
  return j;
}

void CheckStrategiesAgainstItems(const RunConfig& config,
                                 const std::vector<SelectedItem>& items) {
  if (std::find(config.strategies.begin(), config.strategies.end(),
                StrategyKind::kPerfectOcr) == config.strategies.end()) {
    return;
  }
  std::set<std::string> missing;
  for (const auto& item : items) {
    if (!item.table->gt_table_text) missing.insert(item.table->table_id);
  }
  if (missing.empty()) return;
  std::string list;
  for (const auto& id : missing) {
    if (!list.empty()) list += ", ";
    list += id;
  }
  throw Error(ErrorCode::kPrecondition,
              "perfect_ocr needs gt_table_text, missing for table(s): " + list);
}

}  // namespace talent
