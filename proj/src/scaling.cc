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

#include "talent/scaling.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "talent/error.h"
#include "talent/util.h"

namespace talent {

using ordered_json = nlohmann::ordered_json;

void ScalingPoint::Validate() const {
  if (!(s_v > 0) || !(s_l > 0) || !std::isfinite(s_v) || !std::isfinite(s_l)) {
    throw Error(ErrorCode::kInvalidArgument,
                "model sizes must be positive, got s_v=" + std::to_string(s_v) +
                    " s_l=" + std::to_string(s_l));
  }
  if (!(accuracy >= 0 && accuracy <= 100)) {
    throw Error(ErrorCode::kInvalidArgument,
                "accuracy must lie in [0, 100], got " + std::to_string(accuracy));
  }
}

FitResult FitLogLinear(const std::vector<ScalingPoint>& points) {
  const std::size_t n = points.size();
  if (n < 4) {
    throw Error(ErrorCode::kInvalidArgument,
                "scaling fit needs at least 4 points, got " + std::to_string(n));
  }
  std::set<double> distinct_v, distinct_l;
  for (const auto& p : points) {
    p.Validate();
    distinct_v.insert(p.s_v);
    distinct_l.insert(p.s_l);
  }
  if (distinct_v.size() < 2 || distinct_l.size() < 2) {
    throw Error(ErrorCode::kRankDeficient,
                "design is rank deficient: need two distinct s_v and two "
                "distinct s_l values");
  }

  // Centering removes the intercept column, leaving a 2x2 SPD system.
  std::vector<double> xv(n), xl(n);
  double mv = 0, ml = 0, ma = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xv[i] = std::log(points[i].s_v);
    xl[i] = std::log(points[i].s_l);
    mv += xv[i];
    ml += xl[i];
    ma += points[i].accuracy;
  }
  mv /= n;
  ml /= n;
  ma /= n;
  double svv = 0, sll = 0, svl = 0, sva = 0, sla = 0, sst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dv = xv[i] - mv, dl = xl[i] - ml, da = points[i].accuracy - ma;
    svv += dv * dv;
    sll += dl * dl;
    svl += dv * dl;
    sva += dv * da;
    sla += dl * da;
    sst += da * da;
  }

  // Cholesky of [[svv, svl], [svl, sll]].
  const double l11 = std::sqrt(svv);
  const double l21 = svl / l11;
  const double pivot = sll - l21 * l21;
  if (!(pivot > 1e-12 * std::max(svv, sll))) {
    throw Error(ErrorCode::kRankDeficient,
                "design is rank deficient: ln s_v and ln s_l are collinear");
  }
  const double l22 = std::sqrt(pivot);
  const double y1 = sva / l11;
  const double y2 = (sla - l21 * y1) / l22;

  FitResult fit;
  fit.beta_l = y2 / l22;
  fit.beta_v = (y1 - l21 * fit.beta_l) / l11;
  fit.beta0 = ma - fit.beta_v * mv - fit.beta_l * ml;
  fit.n = static_cast<int>(n);
  fit.residuals.resize(n);
  double sse = 0;
  double scale = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.beta0 + fit.beta_v * xv[i] + fit.beta_l * xl[i];
    fit.residuals[i] = points[i].accuracy - pred;
    sse += fit.residuals[i] * fit.residuals[i];
    scale = std::max(scale, std::abs(points[i].accuracy));
  }
  if (sst <= 1e-24 * scale * scale * n) {
    const bool exact = std::all_of(fit.residuals.begin(), fit.residuals.end(),
                                   [&](double r) { return std::abs(r) <= 1e-9 * scale; });
    fit.r_squared = exact ? 1.0 : 0.0;
  } else {
    fit.r_squared = 1.0 - sse / sst;
  }
  return fit;
}

double Predict(const FitResult& fit, double s_v, double s_l) {
  if (!(s_v > 0) || !(s_l > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "model sizes must be positive, got s_v=" + std::to_string(s_v) +
                    " s_l=" + std::to_string(s_l));
  }
  return fit.beta0 + fit.beta_v * std::log(s_v) + fit.beta_l * std::log(s_l);
}

double CoefficientRatio(const FitResult& fit) {
  if (fit.beta_v == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "coefficient ratio undefined: beta_v is zero");
  }
  return fit.beta_l / fit.beta_v;
}

namespace {

std::string Trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double ParseNumber(const std::string& cell, int line_no) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw Error(ErrorCode::kParse, "scaling points line " +
                                       std::to_string(line_no) +
                                       ": not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

std::vector<ScalingPoint> ParseScalingPoints(std::string_view text) {
  std::vector<ScalingPoint> points;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool jsonl = false;
  int iv = -1, il = -1, ia = -1;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (points.empty() && iv < 0 && !jsonl && line[0] == '{') jsonl = true;
    if (jsonl) {
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::kParse, "scaling points line " +
                                           std::to_string(line_no) +
                                           ": invalid JSON");
      }
      try {
        ScalingPoint p{j.at("s_v").get<double>(), j.at("s_l").get<double>(),
                       j.at("accuracy").get<double>()};
        p.Validate();
        points.push_back(p);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, "scaling points line " +
                                           std::to_string(line_no) + ": " +
                                           e.what());
      }
      continue;
    }
    auto cells = SplitCsv(line);
    if (iv < 0) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == "s_v") iv = static_cast<int>(c);
        if (cells[c] == "s_l") il = static_cast<int>(c);
        if (cells[c] == "accuracy") ia = static_cast<int>(c);
      }
      if (iv < 0 || il < 0 || ia < 0) {
        throw Error(ErrorCode::kParse,
                    "scaling points CSV header must name s_v, s_l and accuracy");
      }
      width = cells.size();
      continue;
    }
    if (cells.size() != width) {
      throw Error(ErrorCode::kParse, "scaling points line " +
                                         std::to_string(line_no) + ": expected " +
                                         std::to_string(width) + " columns");
    }
    ScalingPoint p{ParseNumber(cells[iv], line_no), ParseNumber(cells[il], line_no),
                   ParseNumber(cells[ia], line_no)};
    p.Validate();
    points.push_back(p);
  }
  return points;
}

std::vector<ScalingPoint> LoadScalingPoints(const std::filesystem::path& path) {
  return ParseScalingPoints(ReadFile(path));
}

ordered_json FitToJson(const FitResult& fit) {
  ordered_json j;
  j["model"] = "A = beta0 + beta_v * ln(s_v) + beta_l * ln(s_l)";
  j["log_base"] = "e";
  j["beta0"] = fit.beta0;
  j["beta_v"] = fit.beta_v;
  j["beta_l"] = fit.beta_l;
  j["r_squared"] = fit.r_squared;
  j["residuals"] = fit.residuals;
  j["n"] = fit.n;
  return j;
}

std::string RenderActualVsPredicted(const std::vector<ScalingPoint>& points,
                                    const FitResult& fit) {
  std::ostringstream os;
  char buf[160];
  os << "s_v\ts_l\tactual\tpredicted\n";
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%g\t%g\t%.2f\t%.2f\n", p.s_v, p.s_l,
                  p.accuracy, Predict(fit, p.s_v, p.s_l));
    os << buf;
  }
  return os.str();
}

std::string FormatEquation(const FitResult& fit) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "A = %.2f %c %.2f ln(S_V) %c %.2f ln(S_L)  (R² = %.3f, n = %d)",
                fit.beta0, fit.beta_v < 0 ? '-' : '+', std::abs(fit.beta_v),
                fit.beta_l < 0 ? '-' : '+', std::abs(fit.beta_l), fit.r_squared,
                fit.n);
  return buf;
}

}  // namespace talent
