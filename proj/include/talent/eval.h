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

// Containment accuracy: a prediction is correct when it contains the
// ground-truth answer, optionally after normalization or numeric matching.

#ifndef TALENT_EVAL_H_
#define TALENT_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "talent/dataset.h"
#include "talent/pipeline.h"

namespace talent {

enum class MatchMode {
  kStrictContainment,
  kNormalizedContainment,
  kNormalizedPlusNumeric,
};

std::string_view ToString(MatchMode mode);
MatchMode ParseMatchMode(std::string_view name);

struct MatchPolicy {
  MatchMode mode = MatchMode::kNormalizedContainment;
  double numeric_rel_tol = 1e-6;
  // Numeric mode only: "11,832 thousand" also yields 11832000.
  bool expand_unit_words = false;

  void Validate() const;
  friend bool operator==(const MatchPolicy&, const MatchPolicy&) = default;
};

enum class MatchedBy { kNone, kStrict, kNormalized, kNumeric };

std::string_view ToString(MatchedBy by);
MatchedBy ParseMatchedBy(std::string_view name);

// NFKC, lowercase, drop $ € £, drop commas between digits, collapse
// whitespace, trim. Idempotent.
std::string Normalize(std::string_view text);

// Real-number tokens of already normalized text, in order of appearance.
std::vector<double> ExtractNumbers(std::string_view normalized,
                                   bool expand_unit_words = false);

struct MatchResult {
  bool correct = false;
  MatchedBy matched_by = MatchedBy::kNone;
};

// Rules are tried strict, normalized, numeric; matched_by names the first
// that fires within the policy's mode.
MatchResult IsCorrect(std::string_view prediction, std::string_view gt,
                      const MatchPolicy& policy);

struct Prediction {
  std::string qa_id;
  StrategyKind strategy = StrategyKind::kTalent;
  std::optional<std::string> text;   // absent for failed items
  std::optional<std::string> error;
};

// Parses predictions.jsonl (see PredictionLine).
std::vector<Prediction> ParsePredictions(std::string_view jsonl);

struct Accuracy {
  int correct = 0;
  int total = 0;

  // correct / total * 100 rounded half-up to hundredths, as an integer.
  std::int64_t hundredths() const;
  double percent() const { return static_cast<double>(hundredths()) / 100.0; }
  std::string Format() const;  // "70.00"

  friend bool operator==(const Accuracy&, const Accuracy&) = default;
};

struct ItemResult {
  std::string qa_id;
  StrategyKind strategy = StrategyKind::kTalent;
  std::string category;
  bool correct = false;
  MatchedBy matched_by = MatchedBy::kNone;

  friend bool operator==(const ItemResult&, const ItemResult&) = default;
};

struct FailureRecord {
  std::string qa_id;
  StrategyKind strategy = StrategyKind::kTalent;
  std::string error;

  friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

struct EndpointEcho {
  std::string name;
  std::string model;
  std::optional<double> model_size_b;

  friend bool operator==(const EndpointEcho&, const EndpointEcho&) = default;
};

// Everything needed to tell two reports' settings apart.
struct RunEcho {
  std::string dataset_name;
  ManifestKind dataset_kind = ManifestKind::kTableVqaBenchLike;
  std::string resolution = "r1024";
  std::optional<EndpointEcho> vlm;
  std::optional<EndpointEcho> llm;
  std::string prompt_library_sha256;
  std::string transport;
  nlohmann::ordered_json effective_config = nlohmann::ordered_json::object();

  friend bool operator==(const RunEcho&, const RunEcho&) = default;
};

struct EvalReport {
  MatchPolicy policy;
  RunEcho run;
  Accuracy overall;
  std::map<std::string, Accuracy> by_strategy;    // strategy wire name
  std::map<std::string, Accuracy> by_category;    // category wire name
  std::map<std::string, Accuracy> by_model_size;  // "3B-7B"
  std::vector<ItemResult> items;                  // sorted by (qa_id, strategy)
  std::vector<FailureRecord> failures;            // sorted likewise

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Scores predictions against the manifest. Failed predictions are listed
// under `failures` and excluded from accuracy. Throws Error(kNotFound) for
// an unresolved qa_id, Error(kDuplicateId) for a repeated (qa_id,
// strategy), and Error(kEmptyEvaluation) when nothing is left to score.
EvalReport Evaluate(const std::vector<Prediction>& predictions,
                    const DatasetManifest& manifest, const MatchPolicy& policy,
                    const RunEcho& run = {});

// "3B-7B" from the echoed endpoint sizes, empty when either is unknown.
std::string ModelSizeKey(const RunEcho& run);
// 3 -> "3B", 7.5 -> "7.5B".
std::string FormatSizeB(double billions);

// Pretty-printed JSON (2-space indent, trailing newline). Deterministic.
std::string ReportToJson(const EvalReport& report);
EvalReport ReportFromJson(std::string_view text);

// One markdown table per aggregate axis; rows from several reports are
// merged (sweeps, resolution studies).
std::string RenderMarkdown(const std::vector<EvalReport>& reports);
inline std::string RenderMarkdown(const EvalReport& report) {
  return RenderMarkdown(std::vector<EvalReport>{report});
}

}  // namespace talent

#endif  // TALENT_EVAL_H_
