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

// JSON and markdown renderings of EvalReport.

#include <algorithm>
#include <sstream>

#include "talent/error.h"
#include "talent/eval.h"

namespace talent {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json AccuracyJson(const Accuracy& a) {
  ordered_json j;
  j["correct"] = a.correct;
  j["total"] = a.total;
  j["accuracy"] = a.percent();
  return j;
}

Accuracy AccuracyFrom(const ordered_json& j) {
  Accuracy a{j.at("correct").get<int>(), j.at("total").get<int>()};
  if (a.total < 1 || a.correct < 0 || a.correct > a.total) {
    throw Error(ErrorCode::kParse, "report: inconsistent accuracy counts");
  }
  return a;
}

ordered_json AxisJson(const std::map<std::string, Accuracy>& axis) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, a] : axis) j[k] = AccuracyJson(a);
  return j;
}

std::map<std::string, Accuracy> AxisFrom(const ordered_json& j) {
  std::map<std::string, Accuracy> out;
  for (const auto& [k, v] : j.items()) out[k] = AccuracyFrom(v);
  return out;
}

ordered_json EndpointJson(const std::optional<EndpointEcho>& e) {
  if (!e) return nullptr;
  ordered_json j;
  j["name"] = e->name;
  j["model"] = e->model;
  j["model_size_b"] = e->model_size_b ? ordered_json(*e->model_size_b)
                                      : ordered_json(nullptr);
  return j;
}

std::optional<EndpointEcho> EndpointFrom(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  EndpointEcho e;
  e.name = j.at("name").get<std::string>();
  e.model = j.at("model").get<std::string>();
  if (j.contains("model_size_b") && !j.at("model_size_b").is_null()) {
    e.model_size_b = j.at("model_size_b").get<double>();
  }
  return e;
}

std::string EndpointLabel(const std::optional<EndpointEcho>& e) {
  if (!e) return "---";
  if (!e->model.empty()) return e->model;
  return e->name;
}

std::string ResolutionLabel(const std::string& preset) {
  if (preset == "r512") return "512 px";
  if (preset == "r1024") return "1024 px";
  return preset;
}

}  // namespace

std::string ReportToJson(const EvalReport& r) {
  ordered_json j;
  ordered_json dataset;
  dataset["name"] = r.run.dataset_name;
  dataset["kind"] = ToString(r.run.dataset_kind);
  j["dataset"] = std::move(dataset);

  ordered_json config;
  config["match_policy"] = {
      {"mode", ToString(r.policy.mode)},
      {"numeric_rel_tol", r.policy.numeric_rel_tol},
      {"expand_unit_words", r.policy.expand_unit_words}};
  config["resolution"] = r.run.resolution;
  config["vlm"] = EndpointJson(r.run.vlm);
  config["llm"] = EndpointJson(r.run.llm);
  config["prompt_library_sha256"] = r.run.prompt_library_sha256;
  config["transport"] = r.run.transport;
  config["effective"] = r.run.effective_config;
  j["config"] = std::move(config);

  j["overall"] = AccuracyJson(r.overall);
  j["by_strategy"] = AxisJson(r.by_strategy);
  j["by_category"] = AxisJson(r.by_category);
  j["by_model_size"] = AxisJson(r.by_model_size);

  ordered_json items = ordered_json::array();
  for (const auto& it : r.items) {
    ordered_json o;
    o["qa_id"] = it.qa_id;
    o["strategy"] = ToString(it.strategy);
    o["category"] = it.category;
    o["correct"] = it.correct;
    o["matched_by"] = ToString(it.matched_by);
    items.push_back(std::move(o));
  }
  j["items"] = std::move(items);

  ordered_json failures = ordered_json::array();
  for (const auto& f : r.failures) {
    ordered_json o;
    o["qa_id"] = f.qa_id;
    o["strategy"] = ToString(f.strategy);
    o["error"] = f.error;
    failures.push_back(std::move(o));
  }
  j["failures"] = std::move(failures);
  return j.dump(2) + "\n";
}

EvalReport ReportFromJson(std::string_view text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kParse, "report is not a JSON object");
  }
  EvalReport r;
  try {
    r.run.dataset_name = j.at("dataset").at("name").get<std::string>();
    r.run.dataset_kind = j.at("dataset").at("kind").get<std::string>() == "retabvqa"
                             ? ManifestKind::kReTabVqa
                             : ManifestKind::kTableVqaBenchLike;
    const auto& c = j.at("config");
    r.policy.mode = ParseMatchMode(c.at("match_policy").at("mode").get<std::string>());
    r.policy.numeric_rel_tol = c.at("match_policy").at("numeric_rel_tol").get<double>();
    r.policy.expand_unit_words = c.at("match_policy").at("expand_unit_words").get<bool>();
    r.run.resolution = c.at("resolution").get<std::string>();
    r.run.vlm = EndpointFrom(c.at("vlm"));
    r.run.llm = EndpointFrom(c.at("llm"));
    r.run.prompt_library_sha256 = c.at("prompt_library_sha256").get<std::string>();
    r.run.transport = c.at("transport").get<std::string>();
    r.run.effective_config = c.at("effective");

    r.overall = AccuracyFrom(j.at("overall"));
    r.by_strategy = AxisFrom(j.at("by_strategy"));
    r.by_category = AxisFrom(j.at("by_category"));
    r.by_model_size = AxisFrom(j.at("by_model_size"));
    for (const auto& o : j.at("items")) {
      r.items.push_back({o.at("qa_id").get<std::string>(),
                         ParseStrategy(o.at("strategy").get<std::string>()),
                         o.at("category").get<std::string>(),
                         o.at("correct").get<bool>(),
                         ParseMatchedBy(o.at("matched_by").get<std::string>())});
    }
    for (const auto& o : j.at("failures")) {
      r.failures.push_back({o.at("qa_id").get<std::string>(),
                            ParseStrategy(o.at("strategy").get<std::string>()),
                            o.at("error").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string RenderMarkdown(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  const bool retab = std::any_of(reports.begin(), reports.end(), [](const auto& r) {
    return r.run.dataset_kind == ManifestKind::kReTabVqa;
  });

  // Strategy axis. ReTabVQA reports name the model pair by size instead.
  os << "## Accuracy by method\n\n";
  if (retab) {
    os << "| Approach | Model Configuration | Accuracy (%) |\n";
    os << "|---|---|---:|\n";
  } else {
    os << "| Method | VLM | LLM | Accuracy (%) |\n";
    os << "|---|---|---|---:|\n";
  }
  for (const auto& r : reports) {
    for (StrategyKind s : AllStrategies()) {
      auto it = r.by_strategy.find(std::string(ToString(s)));
      if (it == r.by_strategy.end()) continue;
      const std::string vlm = UsesVlm(s) ? EndpointLabel(r.run.vlm) : "---";
      const std::string llm = UsesLlm(s) ? EndpointLabel(r.run.llm) : "---";
      if (retab) {
        std::string config = ModelSizeKey(r.run);
        if (config.empty()) config = vlm + " / " + llm;
        os << "| " << MethodLabel(s) << " | " << config << " | "
           << it->second.Format() << " |\n";
      } else {
        os << "| " << MethodLabel(s) << " | " << vlm << " | " << llm << " | "
           << it->second.Format() << " |\n";
      }
    }
  }

  os << "\n## Accuracy by category\n\n";
  os << "| Category | Correct | Total | Accuracy (%) |\n";
  os << "|---|---:|---:|---:|\n";
  std::map<std::string, Accuracy> categories;
  for (const auto& r : reports) {
    for (const auto& [k, a] : r.by_category) {
      categories[k].correct += a.correct;
      categories[k].total += a.total;
    }
  }
  for (const auto& [k, a] : categories) {
    os << "| " << DisplayName(Category::Parse(k)) << " | " << a.correct << " | "
       << a.total << " | " << a.Format() << " |\n";
  }

  os << "\n## Accuracy by resolution\n\n";
  os << "| Method | Resolution | Accuracy (%) |\n";
  os << "|---|---|---:|\n";
  for (const auto& r : reports) {
    for (StrategyKind s : AllStrategies()) {
      auto it = r.by_strategy.find(std::string(ToString(s)));
      if (it == r.by_strategy.end()) continue;
      os << "| " << MethodLabel(s) << " | " << ResolutionLabel(r.run.resolution)
         << " | " << it->second.Format() << " |\n";
    }
  }

  std::map<std::string, Accuracy> sizes;
  for (const auto& r : reports) {
    for (const auto& [k, a] : r.by_model_size) {
      sizes[k].correct += a.correct;
      sizes[k].total += a.total;
    }
  }
  if (!sizes.empty()) {
    os << "\n## Accuracy by model size\n\n";
    os << "| VLM Size | LLM Size | Accuracy (%) |\n";
    os << "|---|---|---:|\n";
    for (const auto& [k, a] : sizes) {
      const auto dash = k.find('-');
      os << "| " << k.substr(0, dash) << " | " << k.substr(dash + 1) << " | "
         << a.Format() << " |\n";
    }
  }

  std::size_t failures = 0;
  for (const auto& r : reports) failures += r.failures.size();
  if (failures > 0) {
    os << "\n## Failed items\n\n";
    os << "| QA | Strategy | Error |\n";
    os << "|---|---|---|\n";
    for (const auto& r : reports) {
      for (const auto& f : r.failures) {
        std::string err = f.error;
        for (auto& ch : err) {
          if (ch == '|' || ch == '\n') ch = ' ';
        }
        os << "| " << f.qa_id << " | " << ToString(f.strategy) << " | " << err
           << " |\n";
      }
    }
  }
  return os.str();
}

}  // namespace talent
