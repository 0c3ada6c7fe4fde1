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

// Log-linear scaling model
//
//   A = b0 + bv ln(S_V) + bl ln(S_L)
//
// fitted by ordinary least squares over (VLM size, LLM size, accuracy)
// points. Sizes are parameter counts in billions, accuracy in percent.

#ifndef TALENT_SCALING_H_
#define TALENT_SCALING_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace talent {

struct ScalingPoint {
  double s_v = 0;
  double s_l = 0;
  double accuracy = 0;

  void Validate() const;
};

struct FitResult {
  double beta0 = 0;
  double beta_v = 0;
  double beta_l = 0;
  double r_squared = 0;
  std::vector<double> residuals;  // observed - predicted, in input order
  int n = 0;
};

// Throws Error(kInvalidArgument) for fewer than four points or an invalid
// point, Error(kRankDeficient) unless there are at least two distinct s_v
// and two distinct s_l values. When every accuracy is equal R² is 1 if the
// residuals vanish, else 0.
FitResult FitLogLinear(const std::vector<ScalingPoint>& points);

// Throws Error(kInvalidArgument) for a non-positive size.
double Predict(const FitResult& fit, double s_v, double s_l);

// bl / bv. Throws Error(kInvalidArgument) when bv is zero.
double CoefficientRatio(const FitResult& fit);

// CSV with a header naming s_v, s_l and accuracy (any column order), or
// JSON Lines of {"s_v","s_l","accuracy"}. Chosen by content.
std::vector<ScalingPoint> ParseScalingPoints(std::string_view text);
std::vector<ScalingPoint> LoadScalingPoints(const std::filesystem::path& path);

nlohmann::ordered_json FitToJson(const FitResult& fit);

// Two-column actual vs predicted listing, one row per point.
std::string RenderActualVsPredicted(const std::vector<ScalingPoint>& points,
                                    const FitResult& fit);

// "A = 73.01 + 0.84 ln(S_V) + 2.66 ln(S_L)  (R² = 0.825, n = 9)"
std::string FormatEquation(const FitResult& fit);

}  // namespace talent

#endif  // TALENT_SCALING_H_
