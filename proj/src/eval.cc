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

#include "talent/eval.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "talent/error.h"
#include "talent/util.h"

namespace talent {

using nlohmann::json;

namespace {

bool IsAsciiDigit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool IsCurrency(char32_t c) { return c == U'$' || c == U'€' || c == U'£'; }

// One application of every normalization rule.
std::string NormalizeOnce(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kIo, "ICU NFKC normalizer unavailable");
  }
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u = nfkc->normalize(u, status);
  u.toLower(icu::Locale::getRoot());
  u = nfkc->normalize(u, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kIo, "ICU normalization failed");
  }

  std::vector<char32_t> cps;
  cps.reserve(static_cast<std::size_t>(u.length()));
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    if (IsCurrency(static_cast<char32_t>(c))) continue;
    cps.push_back(static_cast<char32_t>(c));
  }

  icu::UnicodeString out;
  bool pending_space = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      pending_space = true;
      continue;
    }
    if (c == U',' && !pending_space && out.length() > 0 &&
        IsAsciiDigit(static_cast<char32_t>(out.char32At(out.length() - 1))) &&
        i + 1 < cps.size() && IsAsciiDigit(cps[i + 1])) {
      continue;
    }
    if (pending_space && out.length() > 0) out.append(static_cast<UChar>(u' '));
    pending_space = false;
    out.append(static_cast<UChar32>(c));
  }
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::optional<double> ParseDouble(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool NumbersMatch(double pred, double gt, double rel_tol) {
  if (gt == 0.0) return std::fabs(pred) <= rel_tol;
  return std::fabs(pred - gt) <= rel_tol * std::fabs(gt);
}

}  // namespace

std::string_view ToString(MatchMode mode) {
  switch (mode) {
    case MatchMode::kStrictContainment: return "strict_containment";
    case MatchMode::kNormalizedContainment: return "normalized_containment";
    case MatchMode::kNormalizedPlusNumeric: return "normalized_plus_numeric";
  }
  return "normalized_containment";
}

MatchMode ParseMatchMode(std::string_view name) {
  if (name == "strict_containment" || name == "strict") {
    return MatchMode::kStrictContainment;
  }
  if (name == "normalized_containment" || name == "normalized") {
    return MatchMode::kNormalizedContainment;
  }
  if (name == "normalized_plus_numeric" || name == "numeric") {
    return MatchMode::kNormalizedPlusNumeric;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown match policy '" + std::string(name) + "'");
}

void MatchPolicy::Validate() const {
  if (!(numeric_rel_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "numeric_rel_tol must be > 0");
  }
}

std::string_view ToString(MatchedBy by) {
  switch (by) {
    case MatchedBy::kNone: return "none";
    case MatchedBy::kStrict: return "strict";
    case MatchedBy::kNormalized: return "normalized";
    case MatchedBy::kNumeric: return "numeric";
  }
  return "none";
}

MatchedBy ParseMatchedBy(std::string_view name) {
  if (name == "strict") return MatchedBy::kStrict;
  if (name == "normalized") return MatchedBy::kNormalized;
  if (name == "numeric") return MatchedBy::kNumeric;
  if (name == "none") return MatchedBy::kNone;
  throw Error(ErrorCode::kParse, "unknown matched_by '" + std::string(name) + "'");
}

std::string Normalize(std::string_view text) {
  // Dropping a character can expose a new composition or digit-comma-digit
  // run, so iterate to a fixed point.
  std::string current = NormalizeOnce(text);
  for (int i = 0; i < 8; ++i) {
    std::string next = NormalizeOnce(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::vector<double> ExtractNumbers(std::string_view s, bool expand_unit_words) {
  static constexpr std::pair<std::string_view, double> kScales[] = {
      {"thousand", 1e3}, {"million", 1e6}, {"billion", 1e9}};
  std::vector<double> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!IsAsciiDigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    // Part of an identifier such as "q3" or "h2o": not a quantity.
    std::size_t start = i;
    const bool glued = start > 0 && std::isalpha(static_cast<unsigned char>(s[start - 1]));
    if (start > 0 && s[start - 1] == '-' &&
        (start == 1 || !std::isalnum(static_cast<unsigned char>(s[start - 2])))) {
      --start;
    }
    while (i < s.size() && IsAsciiDigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i + 1 < s.size() && s[i] == '.' &&
        IsAsciiDigit(static_cast<unsigned char>(s[i + 1]))) {
      ++i;
      while (i < s.size() && IsAsciiDigit(static_cast<unsigned char>(s[i]))) ++i;
    }
    if (glued) continue;
    auto v = ParseDouble(s.substr(start, i - start));
    if (!v) continue;
    out.push_back(*v);
    if (expand_unit_words) {
      std::size_t j = i;
      while (j < s.size() && s[j] == ' ') ++j;
      for (const auto& [word, scale] : kScales) {
        if (s.substr(j, word.size()) == word) out.push_back(*v * scale);
      }
    }
  }
  return out;
}

MatchResult IsCorrect(std::string_view prediction, std::string_view gt,
                      const MatchPolicy& policy) {
  if (prediction.find(gt) != std::string_view::npos) {
    return {true, MatchedBy::kStrict};
  }
  if (policy.mode == MatchMode::kStrictContainment) return {};

  const std::string norm_gt = Normalize(gt);
  const std::string norm_pred = Normalize(prediction);
  // A ground truth made only of currency symbols and spaces normalizes to
  // nothing; only the strict rule applies to it.
  if (!norm_gt.empty() && norm_pred.find(norm_gt) != std::string::npos) {
    return {true, MatchedBy::kNormalized};
  }
  if (policy.mode == MatchMode::kNormalizedContainment) return {};

  const auto gt_numbers = ExtractNumbers(norm_gt, false);
  if (gt_numbers.size() != 1) return {};
  for (double v : ExtractNumbers(norm_pred, policy.expand_unit_words)) {
    if (NumbersMatch(v, gt_numbers[0], policy.numeric_rel_tol)) {
      return {true, MatchedBy::kNumeric};
    }
  }
  return {};
}

std::vector<Prediction> ParsePredictions(std::string_view jsonl) {
  std::vector<Prediction> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j = json::parse(line, nullptr, false);
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kParse, "predictions line " +
                                          std::to_string(line_no) + ": " + why);
    };
    if (j.is_discarded() || !j.is_object()) throw fail("malformed JSON");
    Prediction p;
    try {
      p.qa_id = j.at("qa_id").get<std::string>();
      p.strategy = ParseStrategy(j.at("strategy").get<std::string>());
      if (auto it = j.find("prediction"); it != j.end() && it->is_string()) {
        p.text = it->get<std::string>();
      }
      if (auto it = j.find("error"); it != j.end() && it->is_string()) {
        p.error = it->get<std::string>();
      }
    } catch (const json::exception& e) {
      throw fail(e.what());
    } catch (const Error& e) {
      throw fail(e.what());
    }
    if (!p.text && !p.error) p.error = "missing prediction";
    out.push_back(std::move(p));
  }
  return out;
}

std::int64_t Accuracy::hundredths() const {
  if (total <= 0) return 0;
  const std::int64_t c = correct;
  const std::int64_t n = total;
  return (c * 20000 + n) / (2 * n);
}

std::string Accuracy::Format() const { return FormatHundredths(hundredths()); }

std::string FormatSizeB(double billions) {
  char buf[32];
  if (std::fabs(billions - std::round(billions)) < 1e-9) {
    std::snprintf(buf, sizeof(buf), "%.0fB", billions);
  } else {
    std::snprintf(buf, sizeof(buf), "%gB", billions);
  }
  return buf;
}

std::string ModelSizeKey(const RunEcho& run) {
  if (!run.vlm || !run.llm || !run.vlm->model_size_b || !run.llm->model_size_b) {
    return "";
  }
  return FormatSizeB(*run.vlm->model_size_b) + "-" +
         FormatSizeB(*run.llm->model_size_b);
}

EvalReport Evaluate(const std::vector<Prediction>& predictions,
                    const DatasetManifest& manifest, const MatchPolicy& policy,
                    const RunEcho& run) {
  policy.Validate();
  EvalReport report;
  report.policy = policy;
  report.run = run;
  if (report.run.dataset_name.empty()) report.run.dataset_name = manifest.name;
  report.run.dataset_kind = manifest.kind;

  std::set<std::pair<std::string, StrategyKind>> seen;
  for (const auto& p : predictions) {
    const QAPair* qa = manifest.FindQa(p.qa_id);
    if (qa == nullptr) {
      throw Error(ErrorCode::kNotFound,
                  "prediction references unknown qa_id '" + p.qa_id + "'");
    }
    if (!seen.emplace(p.qa_id, p.strategy).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate prediction for (" + p.qa_id + ", " +
                      std::string(ToString(p.strategy)) + ")");
    }
    if (!p.text) {
      report.failures.push_back(
          {p.qa_id, p.strategy, p.error.value_or("missing prediction")});
      continue;
    }
    const TableRecord* table = manifest.FindTable(qa->table_id);
    MatchResult m = IsCorrect(*p.text, qa->answer, policy);
    report.items.push_back(
        {p.qa_id, p.strategy, table->category.name(), m.correct, m.matched_by});
  }
  if (report.items.empty()) {
    throw Error(ErrorCode::kEmptyEvaluation, "empty evaluation: no scored predictions");
  }

  auto key = [](const auto& x) { return std::pair(x.qa_id, x.strategy); };
  std::sort(report.items.begin(), report.items.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });
  std::sort(report.failures.begin(), report.failures.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });

  const std::string size_key = ModelSizeKey(report.run);
  for (const auto& item : report.items) {
    auto bump = [&](Accuracy& a) {
      ++a.total;
      a.correct += item.correct;
    };
    bump(report.overall);
    bump(report.by_strategy[std::string(ToString(item.strategy))]);
    bump(report.by_category[item.category]);
    if (!size_key.empty()) bump(report.by_model_size[size_key]);
  }
  return report;
}

}  // namespace talent
