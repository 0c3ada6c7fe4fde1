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

#include "talent/dataset.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "talent/error.h"
#include "talent/util.h"

namespace talent {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct StandardName {
  CategoryKind kind;
  std::string_view wire;
  std::string_view display;
};

constexpr StandardName kStandardNames[] = {
    {CategoryKind::kFinancialReports, "financial_reports", "Financial Reports"},
    {CategoryKind::kSportsStatistics, "sports_statistics", "Sports Statistics"},
    {CategoryKind::kSurveyResults, "survey_results", "Survey Results"},
    {CategoryKind::kScientificTables, "scientific_tables", "Scientific Tables"},
};

[[noreturn]] void ParseFail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse,
              "manifest line " + std::to_string(line) + ": " + what);
}

std::string RequireString(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) ParseFail(line, std::string("missing field '") + key + "'");
  if (!it->is_string()) {
    ParseFail(line, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> OptionalString(const json& obj, const char* key,
                                          std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    ParseFail(line, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

ManifestKind ParseKind(const std::string& s, std::size_t line) {
  if (s == "retabvqa") return ManifestKind::kReTabVqa;
  if (s == "tablevqa_bench_like") return ManifestKind::kTableVqaBenchLike;
  ParseFail(line, "unknown manifest kind '" + s + "'");
}

ReasoningTag ParseTag(const std::optional<std::string>& s, std::size_t line) {
  if (!s || *s == "lookup") return ReasoningTag::kLookup;
  if (*s == "multi_step") return ReasoningTag::kMultiStep;
  ParseFail(line, "unknown reasoning_tag '" + *s + "'");
}

void ApplyMeta(const json& obj, std::size_t line, DatasetManifest& m) {
  m.name = OptionalString(obj, "name", line).value_or("");
  if (auto kind = OptionalString(obj, "kind", line)) {
    m.kind = ParseKind(*kind, line);
  }
  if (auto it = obj.find("declared_counts"); it != obj.end() && !it->is_null()) {
    if (!it->is_object()) ParseFail(line, "declared_counts must be an object");
    try {
      m.declared_counts = DeclaredCounts{
          it->at("tables_per_category").get<int>(),
          it->at("qa_per_table").get<int>()};
    } catch (const json::exception& e) {
      ParseFail(line, std::string("bad declared_counts: ") + e.what());
    }
  }
}

TableRecord ParseTable(const json& obj, std::size_t line) {
  TableRecord t;
  t.table_id = RequireString(obj, "table_id", line);
  t.image_path = RequireString(obj, "image_path", line);
  t.category = Category::Parse(RequireString(obj, "category", line));
  t.gt_table_text = OptionalString(obj, "gt_table_text", line);
  t.source_split = OptionalString(obj, "source_split", line).value_or("");
  return t;
}

QAPair ParseQa(const json& obj, std::size_t line) {
  QAPair q;
  q.qa_id = RequireString(obj, "qa_id", line);
  q.table_id = RequireString(obj, "table_id", line);
  q.question = RequireString(obj, "question", line);
  q.answer = RequireString(obj, "answer", line);
  q.reasoning_tag = ParseTag(OptionalString(obj, "reasoning_tag", line), line);
  return q;
}

void ParseJsonLines(std::string_view text, DatasetManifest& m) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool seen_entry = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      ParseFail(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) ParseFail(line_no, "expected a JSON object");
    std::string type = RequireString(obj, "type", line_no);
    if (type == "meta") {
      if (seen_entry) ParseFail(line_no, "meta line must precede all entries");
      ApplyMeta(obj, line_no, m);
    } else if (type == "table") {
      seen_entry = true;
      m.records.push_back(ParseTable(obj, line_no));
    } else if (type == "qa") {
      seen_entry = true;
      m.qa_pairs.push_back(ParseQa(obj, line_no));
    } else {
      ParseFail(line_no, "unknown type '" + type + "'");
    }
    if (end == text.size()) break;
  }
}

void ParseSingleJson(const json& doc, DatasetManifest& m) {
  ApplyMeta(doc, 1, m);
  std::size_t i = 0;
  for (const auto& t : doc.value("tables", json::array())) {
    ++i;
    if (!t.is_object()) ParseFail(i, "table entry must be an object");
    m.records.push_back(ParseTable(t, i));
  }
  i = 0;
  for (const auto& q : doc.value("qa_pairs", json::array())) {
    ++i;
    if (!q.is_object()) ParseFail(i, "qa entry must be an object");
    m.qa_pairs.push_back(ParseQa(q, i));
  }
}

}  // namespace

Category Category::Parse(std::string_view name) {
  Category c;
  c.name_ = std::string(name);
  c.kind_ = CategoryKind::kOther;
  for (const auto& s : kStandardNames) {
    if (s.wire == name) c.kind_ = s.kind;
  }
  return c;
}

const std::vector<Category>& StandardCategories() {
  static const std::vector<Category> kAll = [] {
    std::vector<Category> v;
    for (const auto& s : kStandardNames) v.push_back(Category::Parse(s.wire));
    return v;
  }();
  return kAll;
}

std::string DisplayName(const Category& category) {
  for (const auto& s : kStandardNames) {
    if (s.kind == category.kind()) return std::string(s.display);
  }
  return category.name();
}

std::string_view ToString(ReasoningTag tag) {
  return tag == ReasoningTag::kMultiStep ? "multi_step" : "lookup";
}

std::string_view ToString(ManifestKind kind) {
  return kind == ManifestKind::kReTabVqa ? "retabvqa" : "tablevqa_bench_like";
}

const TableRecord* DatasetManifest::FindTable(std::string_view table_id) const {
  for (const auto& t : records) {
    if (t.table_id == table_id) return &t;
  }
  return nullptr;
}

const QAPair* DatasetManifest::FindQa(std::string_view qa_id) const {
  for (const auto& q : qa_pairs) {
    if (q.qa_id == qa_id) return &q;
  }
  return nullptr;
}

DatasetManifest ParseManifest(std::string_view text,
                              const std::filesystem::path& base_dir,
                              bool check_images) {
  DatasetManifest m;
  m.base_dir = base_dir;

  // A single JSON document is recognised by its top-level "tables" or
  // "qa_pairs" arrays; anything else is treated as JSON Lines.
  json whole = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (whole.is_object() && !whole.contains("type") &&
      (whole.contains("tables") || whole.contains("qa_pairs"))) {
    ParseSingleJson(whole, m);
  } else {
    ParseJsonLines(text, m);
  }

  for (auto& t : m.records) {
    std::filesystem::path p(t.image_path);
    t.image_file = p.is_absolute() ? p : (base_dir / p).lexically_normal();
  }
  ValidateManifest(m, check_images);
  return m;
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingFile,
                "manifest not found: " + path.string());
  }
  std::filesystem::path base = std::filesystem::absolute(path).parent_path();
  return ParseManifest(ReadFile(path), base, /*check_images=*/true);
}

void ValidateManifest(const DatasetManifest& m, bool check_images) {
  std::unordered_set<std::string> table_ids;
  for (const auto& t : m.records) {
    if (t.table_id.empty()) {
      throw Error(ErrorCode::kParse, "table with empty table_id");
    }
    if (!table_ids.insert(t.table_id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate table_id '" + t.table_id + "'");
    }
    if (check_images && !std::filesystem::exists(t.image_file)) {
      throw Error(ErrorCode::kMissingFile,
                  "image for table '" + t.table_id +
                      "' not found: " + t.image_file.string());
    }
    if (m.kind == ManifestKind::kReTabVqa && !t.category.is_standard()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "table '" + t.table_id + "' has category '" +
                      t.category.name() +
                      "', which is not a ReTabVQA category");
    }
  }

  std::unordered_set<std::string> qa_ids;
  for (const auto& q : m.qa_pairs) {
    if (!qa_ids.insert(q.qa_id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate qa_id '" + q.qa_id + "'");
    }
    if (!table_ids.contains(q.table_id)) {
      throw Error(ErrorCode::kDanglingReference,
                  "qa '" + q.qa_id + "' references unknown table '" +
                      q.table_id + "'");
    }
    if (q.question.empty() || q.answer.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "qa '" + q.qa_id + "' has an empty question or answer");
    }
  }

  if (m.kind == ManifestKind::kReTabVqa && m.declared_counts) {
    const auto& declared = *m.declared_counts;
    ManifestStats stats = ComputeStats(m);
    std::unordered_map<std::string, int> qa_per_table;
    for (const auto& q : m.qa_pairs) ++qa_per_table[q.table_id];
    for (const auto& cat : StandardCategories()) {
      auto it = stats.by_category.find(cat);
      int tables = it == stats.by_category.end() ? 0 : it->second.table_count;
      if (tables != declared.tables_per_category) {
        throw Error(ErrorCode::kInvalidArgument,
                    "category '" + cat.name() + "' has " +
                        std::to_string(tables) + " tables, declared " +
                        std::to_string(declared.tables_per_category));
      }
    }
    for (const auto& t : m.records) {
      int n = qa_per_table[t.table_id];
      if (n != declared.qa_per_table) {
        throw Error(ErrorCode::kInvalidArgument,
                    "table '" + t.table_id + "' has " + std::to_string(n) +
                        " QA pairs, declared " +
                        std::to_string(declared.qa_per_table));
      }
    }
  }
}

std::string SerializeManifest(const DatasetManifest& m) {
  std::string out;
  ordered_json meta;
  meta["type"] = "meta";
  meta["name"] = m.name;
  meta["kind"] = ToString(m.kind);
  if (m.declared_counts) {
    meta["declared_counts"] = {
        {"tables_per_category", m.declared_counts->tables_per_category},
        {"qa_per_table", m.declared_counts->qa_per_table}};
  }
  out += meta.dump() + "\n";
  for (const auto& t : m.records) {
    ordered_json j;
    j["type"] = "table";
    j["table_id"] = t.table_id;
    j["image_path"] = t.image_path;
    j["category"] = t.category.name();
    if (t.gt_table_text) j["gt_table_text"] = *t.gt_table_text;
    if (!t.source_split.empty()) j["source_split"] = t.source_split;
    out += j.dump() + "\n";
  }
  for (const auto& q : m.qa_pairs) {
    ordered_json j;
    j["type"] = "qa";
    j["qa_id"] = q.qa_id;
    j["table_id"] = q.table_id;
    j["question"] = q.question;
    j["answer"] = q.answer;
    j["reasoning_tag"] = ToString(q.reasoning_tag);
    out += j.dump() + "\n";
  }
  return out;
}

ManifestStats ComputeStats(const DatasetManifest& m) {
  ManifestStats stats;
  std::unordered_map<std::string, Category> table_category;
  for (const auto& t : m.records) {
    ++stats.by_category[t.category].table_count;
    table_category.emplace(t.table_id, t.category);
  }
  for (const auto& q : m.qa_pairs) {
    auto it = table_category.find(q.table_id);
    if (it == table_category.end()) continue;  // unreachable on valid input
    ++stats.by_category[it->second].qa_count;
  }
  for (const auto& [cat, s] : stats.by_category) {
    stats.total.table_count += s.table_count;
    stats.total.qa_count += s.qa_count;
  }
  return stats;
}

std::string RenderStats(const ManifestStats& stats) {
  std::ostringstream os;
  os << "| Category | # Tables | # QA Pairs |\n";
  os << "|---|---:|---:|\n";
  std::set<Category> emitted;
  auto row = [&](const Category& c, const CategoryStats& s) {
    os << "| " << DisplayName(c) << " | " << s.table_count << " | "
       << s.qa_count << " |\n";
  };
  for (const auto& c : StandardCategories()) {
    if (auto it = stats.by_category.find(c); it != stats.by_category.end()) {
      row(c, it->second);
      emitted.insert(c);
    }
  }
  for (const auto& [c, s] : stats.by_category) {
    if (!emitted.contains(c)) row(c, s);
  }
  os << "| **Total** | " << stats.total.table_count << " | "
     << stats.total.qa_count << " |\n";
  return os.str();
}

std::vector<SelectedItem> SelectItems(const DatasetManifest& m,
                                      const SelectionFilter& filter) {
  std::set<std::string> known_categories;
  for (const auto& t : m.records) known_categories.insert(t.category.name());
  for (const auto& c : filter.categories) {
    if (!known_categories.contains(c)) {
      throw Error(ErrorCode::kNotFound,
                  "filter references unknown category '" + c + "'");
    }
  }
  for (const auto& id : filter.qa_ids) {
    if (m.FindQa(id) == nullptr) {
      throw Error(ErrorCode::kNotFound,
                  "filter references unknown qa_id '" + id + "'");
    }
  }
  const std::set<std::string> want_categories(filter.categories.begin(),
                                              filter.categories.end());
  const std::set<std::string> want_ids(filter.qa_ids.begin(),
                                       filter.qa_ids.end());

  std::vector<SelectedItem> items;
  for (const auto& q : m.qa_pairs) {
    const TableRecord* t = m.FindTable(q.table_id);
    if (!want_categories.empty() && !want_categories.contains(t->category.name())) {
      continue;
    }
    if (!want_ids.empty() && !want_ids.contains(q.qa_id)) continue;
    items.push_back({t, &q});
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.qa->qa_id < b.qa->qa_id;
  });

  if (filter.seed) {
    // Fisher-Yates over mt19937_64 with rejection sampling; unlike
    // std::shuffle this is identical across standard libraries.
    std::mt19937_64 rng(*filter.seed);
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::uint64_t bound = i;
      const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
      std::uint64_t r;
      do {
        r = rng();
      } while (r >= limit);
      std::swap(items[i - 1], items[r % bound]);
    }
  }
  if (filter.limit && items.size() > *filter.limit) {
    items.resize(*filter.limit);
  }
  return items;
}

}  // namespace talent
