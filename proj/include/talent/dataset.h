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

// Benchmark manifests: table images plus question/answer pairs.
//
// On disk a manifest is JSON Lines. Every line carries a "type"
// discriminator:
//
//   {"type":"meta","name":...,"kind":"retabvqa","declared_counts":{...}}
//   {"type":"table","table_id":...,"image_path":...,"category":...}
//   {"type":"qa","qa_id":...,"table_id":...,"question":...,"answer":...}
//
// The meta line is optional and must come first. Image paths are relative
// to the manifest's directory.

#ifndef TALENT_DATASET_H_
#define TALENT_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace talent {

enum class CategoryKind {
  kFinancialReports,
  kSportsStatistics,
  kSurveyResults,
  kScientificTables,
  kOther,
};

// One of the four benchmark domains, or a free-form label.
class Category {
 public:
  Category() = default;
  static Category Parse(std::string_view name);

  CategoryKind kind() const { return kind_; }
  // Wire name: "financial_reports", ... or the free-form label.
  const std::string& name() const { return name_; }
  bool is_standard() const { return kind_ != CategoryKind::kOther; }

  friend bool operator==(const Category&, const Category&) = default;
  friend auto operator<=>(const Category& a, const Category& b) {
    return a.name_ <=> b.name_;
  }

 private:
  CategoryKind kind_ = CategoryKind::kOther;
  std::string name_;
};

// The four standard categories in their canonical reporting order.
const std::vector<Category>& StandardCategories();
// "financial_reports" -> "Financial Reports"; free-form labels pass through.
std::string DisplayName(const Category& category);

enum class ReasoningTag { kLookup, kMultiStep };

std::string_view ToString(ReasoningTag tag);

struct TableRecord {
  std::string table_id;
  std::string image_path;  // as written in the manifest
  Category category;
  std::optional<std::string> gt_table_text;  // markdown or HTML, verbatim
  std::string source_split;

  // image_path resolved against the manifest directory. Not serialized.
  std::filesystem::path image_file;

  friend bool operator==(const TableRecord&, const TableRecord&) = default;
};

struct QAPair {
  std::string qa_id;
  std::string table_id;
  std::string question;
  std::string answer;
  ReasoningTag reasoning_tag = ReasoningTag::kLookup;

  friend bool operator==(const QAPair&, const QAPair&) = default;
};

enum class ManifestKind { kTableVqaBenchLike, kReTabVqa };

std::string_view ToString(ManifestKind kind);

struct DeclaredCounts {
  int tables_per_category = 0;
  int qa_per_table = 0;

  friend bool operator==(const DeclaredCounts&,
                         const DeclaredCounts&) = default;
};

struct DatasetManifest {
  std::string name;
  ManifestKind kind = ManifestKind::kTableVqaBenchLike;
  std::vector<TableRecord> records;
  std::vector<QAPair> qa_pairs;
  std::optional<DeclaredCounts> declared_counts;
  std::filesystem::path base_dir;

  // Returns nullptr when absent.
  const TableRecord* FindTable(std::string_view table_id) const;
  const QAPair* FindQa(std::string_view qa_id) const;

  friend bool operator==(const DatasetManifest&,
                         const DatasetManifest&) = default;
};

// Loads and fully validates a manifest (JSON Lines, or a single JSON object
// with "tables" and "qa_pairs" arrays). Image files must exist; they are
// not decoded here.
DatasetManifest LoadManifest(const std::filesystem::path& path);

// Parses manifest text. `base_dir` resolves image paths; `check_images`
// controls whether missing image files are an error.
DatasetManifest ParseManifest(std::string_view text,
                              const std::filesystem::path& base_dir,
                              bool check_images = true);

// Checks every invariant; throws Error on the first violation.
void ValidateManifest(const DatasetManifest& manifest, bool check_images);

// JSON Lines encoding accepted by ParseManifest.
std::string SerializeManifest(const DatasetManifest& manifest);

struct CategoryStats {
  int table_count = 0;
  int qa_count = 0;

  friend bool operator==(const CategoryStats&, const CategoryStats&) = default;
};

struct ManifestStats {
  std::map<Category, CategoryStats> by_category;
  CategoryStats total;
};

ManifestStats ComputeStats(const DatasetManifest& manifest);

// Markdown rendering of ManifestStats with "Category | # Tables | # QA Pairs".
std::string RenderStats(const ManifestStats& stats);

struct SelectionFilter {
  std::vector<std::string> categories;
  std::vector<std::string> qa_ids;
  std::optional<std::size_t> limit;
  std::optional<std::uint64_t> seed;
};

struct SelectedItem {
  const TableRecord* table;
  const QAPair* qa;
};

// Items sorted by qa_id, then shuffled when a seed is given, then truncated
// to `limit`. Pointers refer into `manifest`.
std::vector<SelectedItem> SelectItems(const DatasetManifest& manifest,
                                      const SelectionFilter& filter);

}  // namespace talent

#endif  // TALENT_DATASET_H_
