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

#include "talent/cli.h"

#include <algorithm>
#include <csignal>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "talent/cache.h"
#include "talent/config.h"
#include "talent/dataset.h"
#include "talent/error.h"
#include "talent/eval.h"
#include "talent/imaging.h"
#include "talent/runner.h"
#include "talent/scaling.h"
#include "talent/service.h"
#include "talent/util.h"

namespace talent::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string>& BoolKeys() {
  static const std::set<std::string> keys = {
      "fail-fast", "allow-upscale", "pad-to-square", "expand-unit-words",
      "concurrent-dual"};
  return keys;
}

// Registers one --<key> option per config key plus --config on `app`.
class ConfigFlags {
 public:
  explicit ConfigFlags(CLI::App* app) {
    app->add_option("--config", config_file_, "JSON config file (flat kebab-case keys)");
    for (const auto& key : ConfigKeys()) {
      std::string& slot = values_[key];
      if (BoolKeys().count(key)) {
        options_[key] = app->add_flag("--" + key + "{true}", slot);
      } else {
        options_[key] = app->add_option("--" + key, slot);
      }
      options_[key]->group("Run configuration");
    }
  }

  RunConfig Resolve(char** envp) const {
    std::vector<std::pair<std::string, std::string>> flags;
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) flags.emplace_back(key, values_.at(key));
    }
    std::optional<fs::path> file;
    if (!config_file_.empty()) file = config_file_;
    try {
      return ResolveConfig(file, SettingsFromEnvironment(envp), flags);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidArgument) throw UsageError(e.what());
      throw;
    }
  }

  bool given(const std::string& key) const { return options_.at(key)->count() > 0; }

 private:
  std::string config_file_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
};

void ValidateOrUsage(const RunConfig& cfg) {
  try {
    cfg.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::string Percent(const Accuracy& a) {
  return a.Format() + "% (" + std::to_string(a.correct) + "/" +
         std::to_string(a.total) + ")";
}

void PrintRunSummary(const RunResult& result, const Harness& harness,
                     std::ostream& out) {
  std::size_t failed = 0;
  for (const auto& o : result.outcomes) failed += o.error ? 1 : 0;
  if (result.report) {
    out << "overall accuracy: " << Percent(result.report->overall) << "\n";
    for (const auto& [name, acc] : result.report->by_strategy) {
      out << "  " << name << ": " << Percent(acc) << "\n";
    }
  }
  if (failed > 0) {
    out << "PARTIAL: " << failed << " of " << result.outcomes.size()
        << " items failed; they are excluded from accuracy and listed under "
           "\"failures\" in report.json\n";
  }
  if (harness.caching) {
    out << "cache: " << harness.caching->hits() << " hits, "
        << harness.caching->misses() << " misses\n";
  }
}

int CmdValidate(const std::string& path, bool no_images, std::ostream& out,
                std::ostream& err) {
  DatasetManifest m;
  try {
    if (!fs::exists(path)) {
      throw Error(ErrorCode::kMissingFile, "manifest not found: " + path);
    }
    m = ParseManifest(ReadFile(path), fs::absolute(path).parent_path(), !no_images);
  } catch (const Error& e) {
    err << "invalid manifest: " << e.what() << "\n";
    return kExitFailure;
  }
  out << "manifest '" << m.name << "' (" << ToString(m.kind) << ") is valid\n\n";
  out << RenderStats(ComputeStats(m));
  return kExitOk;
}

int CmdIngest(const std::string& input, const std::string& output,
              std::ostream& out) {
  DatasetManifest m = LoadManifest(input);
  const fs::path dest = fs::absolute(output);
  // Image paths are rewritten relative to the new manifest's directory.
  for (auto& t : m.records) {
    t.image_path = fs::relative(t.image_file, dest.parent_path()).generic_string();
  }
  fs::create_directories(dest.parent_path());
  WriteFileAtomic(dest, SerializeManifest(m));
  out << "wrote " << dest.string() << "\n\n" << RenderStats(ComputeStats(m));
  return kExitOk;
}

int CmdRun(const ConfigFlags& flags, char** envp, std::ostream& out,
           std::ostream& err) {
  RunConfig cfg = flags.Resolve(envp);
  if (cfg.manifest.empty()) throw UsageError("--manifest is required");
  ValidateOrUsage(cfg);
  const DatasetManifest manifest = LoadManifest(cfg.manifest);
  const Harness harness = BuildHarness(cfg);
  RunResult result = ExecuteRun(cfg, manifest, harness);
  for (const auto& p : WriteRunOutputs(cfg.output_dir, result)) {
    out << "wrote " << p.string() << "\n";
  }
  PrintRunSummary(result, harness, out);
  if (!result.report) {
    err << "no report: " << result.report_error.value_or("nothing to score") << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int CmdEval(const ConfigFlags& flags, const std::string& predictions_path,
            char** envp, std::ostream& out) {
  RunConfig cfg = flags.Resolve(envp);
  if (cfg.manifest.empty()) throw UsageError("--manifest is required");
  const DatasetManifest manifest = LoadManifest(cfg.manifest);
  const auto predictions = ParsePredictions(ReadFile(predictions_path));
  RunEcho echo;
  echo.dataset_name = manifest.name;
  echo.dataset_kind = manifest.kind;
  echo.resolution = std::string(ToString(cfg.resolution.target));
  echo.transport = "none";
  echo.effective_config = EffectiveConfig(cfg);
  const EvalReport report = Evaluate(predictions, manifest, cfg.policy, echo);
  if (flags.given("output-dir")) {
    fs::create_directories(cfg.output_dir);
    WriteFileAtomic(cfg.output_dir / "report.json", ReportToJson(report));
    WriteFileAtomic(cfg.output_dir / "report.md", RenderMarkdown(report));
    out << "wrote " << (cfg.output_dir / "report.json").string() << "\n";
  }
  out << "overall accuracy: " << Percent(report.overall) << "\n\n"
      << RenderMarkdown(report);
  return kExitOk;
}

int CmdReport(const std::vector<std::string>& inputs, const std::string& output,
              std::ostream& out) {
  std::vector<EvalReport> reports;
  for (const auto& path : inputs) {
    try {
      reports.push_back(ReportFromJson(ReadFile(path)));
    } catch (const Error& e) {
      throw Error(e.code(), path + ": " + e.what());
    }
  }
  const std::string md = RenderMarkdown(reports);
  if (output.empty()) {
    out << md;
  } else {
    WriteFileAtomic(output, md);
    out << "wrote " << output << "\n";
  }
  return kExitOk;
}

int CmdFitScaling(const std::string& points_path, const std::string& output,
                  const std::string& listing, std::ostream& out) {
  const auto points = LoadScalingPoints(points_path);
  const FitResult fit = FitLogLinear(points);
  char buf[64];
  out << FormatEquation(fit) << "\n";
  out << "log base: e\n";
  std::snprintf(buf, sizeof buf, "%.6f", fit.beta0);
  out << "beta0 = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", fit.beta_v);
  out << "beta_v = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", fit.beta_l);
  out << "beta_l = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", fit.r_squared);
  out << "r_squared = " << buf << "\n";
  if (fit.beta_v != 0) {
    std::snprintf(buf, sizeof buf, "%.3f", CoefficientRatio(fit));
    out << "beta_l / beta_v = " << buf << "\n";
  }
  const std::string table = RenderActualVsPredicted(points, fit);
  out << "\n" << table;
  if (!output.empty()) {
    WriteFileAtomic(output, FitToJson(fit).dump(2) + "\n");
    out << "\nwrote " << output << "\n";
  }
  if (!listing.empty()) {
    WriteFileAtomic(listing, table);
    out << "wrote " << listing << "\n";
  }
  return kExitOk;
}

int CmdAsk(const ConfigFlags& flags, const std::string& image_path,
           const std::string& question, const std::string& strategy_name,
           const std::string& gt_table_path, char** envp, std::ostream& out) {
  RunConfig cfg = flags.Resolve(envp);
  StrategyKind strategy;
  try {
    strategy = ParseStrategy(strategy_name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  cfg.strategies = {strategy};
  ValidateOrUsage(cfg);
  std::optional<std::string> gt;
  if (!gt_table_path.empty()) gt = ReadFile(gt_table_path);
  if (strategy == StrategyKind::kPerfectOcr && !gt) {
    throw UsageError("perfect_ocr needs --gt-table");
  }
  const Harness harness = BuildHarness(cfg);
  ImageBuffer image;
  if (UsesVlm(strategy)) image = ResizeToPreset(LoadImage(image_path), cfg.resolution);
  const AnswerResult r = harness.pipeline->AnswerImage(strategy, image, gt, question);
  out << r.prediction << "\n\n" << r.trace.ToJson().dump(2) << "\n";
  return kExitOk;
}

int CmdServe(const ConfigFlags& flags, const std::string& host, int port,
             int ttl_s, const std::string& session_dir, const std::string& cors,
             char** envp, std::ostream& out) {
  ServiceOptions options;
  options.base_config = flags.Resolve(envp);
  ValidateOrUsage(options.base_config);
  options.session_ttl = std::chrono::seconds(ttl_s);
  if (!session_dir.empty()) options.session_dir = session_dir;
  options.cors_origin = cors;
  Service service(std::move(options));
  out << "serving on http://" << host << ":" << port << "\n" << std::flush;
  service.ListenBlocking(host, port);
  return kExitOk;
}

int CmdSweep(const ConfigFlags& flags, const std::string& grid_path, char** envp,
             std::ostream& out, std::ostream& err) {
  const RunConfig base = flags.Resolve(envp);
  if (base.manifest.empty()) throw UsageError("--manifest is required");
  json grid = json::parse(ReadFile(grid_path), nullptr, false);
  if (grid.is_discarded() || !grid.contains("vlm") || !grid.contains("llm") ||
      !grid["vlm"].is_array() || !grid["llm"].is_array()) {
    throw UsageError(grid_path + ": grid must be {\"vlm\": [...], \"llm\": [...]}");
  }
  const DatasetManifest manifest = LoadManifest(base.manifest);
  const StrategyKind headline = base.strategies.front();

  struct Cell {
    std::string vlm, llm;
    std::optional<Accuracy> acc;
  };
  std::vector<Cell> cells;
  std::vector<EvalReport> reports;
  std::vector<ScalingPoint> points;
  std::vector<std::string> vlm_labels, llm_labels;
  bool sizes_known = true;

  for (const auto& v : grid["vlm"]) {
    for (const auto& l : grid["llm"]) {
      RunConfig cfg = base;
      try {
        for (const auto& [k, val] : v.items()) ApplySetting(cfg, "vlm-" + k, val);
        for (const auto& [k, val] : l.items()) ApplySetting(cfg, "llm-" + k, val);
      } catch (const Error& e) {
        throw UsageError(grid_path + ": " + e.what());
      }
      ValidateOrUsage(cfg);
      const std::string vlabel = cfg.vlm.model_size_b ? FormatSizeB(*cfg.vlm.model_size_b)
                                                      : cfg.vlm.name;
      const std::string llabel = cfg.llm.model_size_b ? FormatSizeB(*cfg.llm.model_size_b)
                                                      : cfg.llm.name;
      if (std::find(vlm_labels.begin(), vlm_labels.end(), vlabel) == vlm_labels.end()) {
        vlm_labels.push_back(vlabel);
      }
      if (std::find(llm_labels.begin(), llm_labels.end(), llabel) == llm_labels.end()) {
        llm_labels.push_back(llabel);
      }
      cfg.output_dir = base.output_dir / (cfg.vlm.name + "__" + cfg.llm.name);
      const Harness harness = BuildHarness(cfg);
      RunResult result = ExecuteRun(cfg, manifest, harness);
      WriteRunOutputs(cfg.output_dir, result);
      Cell cell{vlabel, llabel, std::nullopt};
      if (result.report) {
        auto it = result.report->by_strategy.find(std::string(ToString(headline)));
        if (it != result.report->by_strategy.end()) cell.acc = it->second;
        reports.push_back(*result.report);
      } else {
        err << "cell " << vlabel << " x " << llabel << ": no report ("
            << result.report_error.value_or("nothing to score") << ")\n";
      }
      if (cfg.vlm.model_size_b && cfg.llm.model_size_b && cell.acc) {
        points.push_back({*cfg.vlm.model_size_b, *cfg.llm.model_size_b,
                          cell.acc->percent()});
      } else {
        sizes_known = false;
      }
      cells.push_back(cell);
    }
  }

  std::ostringstream md;
  md << "## " << MethodLabel(headline) << " accuracy (%) by model pair\n\n";
  md << "| VLM \\ LLM |";
  for (const auto& l : llm_labels) md << " " << l << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < llm_labels.size(); ++i) md << "---:|";
  md << "\n";
  for (const auto& v : vlm_labels) {
    md << "| " << v << " |";
    for (const auto& l : llm_labels) {
      auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
        return c.vlm == v && c.llm == l;
      });
      md << " " << (it != cells.end() && it->acc ? it->acc->Format() : "---") << " |";
    }
    md << "\n";
  }

  fs::create_directories(base.output_dir);
  if (sizes_known && !points.empty()) {
    std::ostringstream csv;
    csv << "s_v,s_l,accuracy\n";
    for (const auto& p : points) csv << p.s_v << "," << p.s_l << "," << p.accuracy << "\n";
    WriteFileAtomic(base.output_dir / "scaling_points.csv", csv.str());
    try {
      const FitResult fit = FitLogLinear(points);
      md << "\n## Scaling fit\n\n" << FormatEquation(fit) << "\n\n```\n"
         << RenderActualVsPredicted(points, fit) << "```\n";
      WriteFileAtomic(base.output_dir / "fit.json", FitToJson(fit).dump(2) + "\n");
    } catch (const Error& e) {
      md << "\nscaling fit skipped: " << e.what() << "\n";
    }
  }
  if (!reports.empty()) md << "\n" << RenderMarkdown(reports);
  WriteFileAtomic(base.output_dir / "sweep.md", md.str());
  out << md.str();
  return reports.size() == cells.size() ? kExitOk : kExitFailure;
}

int CmdCachePurge(const ConfigFlags& flags, char** envp, std::ostream& out) {
  const RunConfig cfg = flags.Resolve(envp);
  if (!cfg.cache_dir) throw UsageError("--cache-dir is required");
  ResponseCache cache(*cfg.cache_dir);
  out << "purged " << cache.Purge() << " entries from " << cfg.cache_dir->string()
      << "\n";
  return kExitOk;
}

}  // namespace

int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err, char** envp) {
  CLI::App app{"Table VQA harness: run, evaluate and report dual-representation pipelines"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto* validate = app.add_subcommand("validate", "Check a manifest and print its statistics");
  std::string validate_path;
  bool no_images = false;
  validate->add_option("manifest", validate_path, "Manifest (JSON or JSONL)")->required();
  validate->add_flag("--no-images", no_images, "Skip the image existence check");

  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and rewrite it as JSONL");
  std::string ingest_in, ingest_out;
  ingest->add_option("--input", ingest_in)->required();
  ingest->add_option("--output", ingest_out)->required();

  auto* run = app.add_subcommand("run", "Run strategies over a manifest and score them");
  ConfigFlags run_flags(run);

  auto* eval = app.add_subcommand("eval", "Score an existing predictions file");
  ConfigFlags eval_flags(eval);
  std::string predictions_path;
  eval->add_option("--predictions", predictions_path)->required();

  auto* report = app.add_subcommand("report", "Merge report.json files into markdown tables");
  std::vector<std::string> report_inputs;
  std::string report_output;
  report->add_option("reports", report_inputs)->required();
  report->add_option("--output", report_output, "Write markdown here instead of stdout");

  auto* fit = app.add_subcommand("fit-scaling", "Fit the log-linear model-size scaling law");
  std::string points_path, fit_output, fit_listing;
  fit->add_option("--points", points_path, "CSV or JSONL of s_v, s_l, accuracy")->required();
  fit->add_option("--output", fit_output, "Fit JSON path");
  fit->add_option("--listing", fit_listing, "Actual vs predicted listing path");

  auto* ask = app.add_subcommand("ask", "Answer one question about one table image");
  ConfigFlags ask_flags(ask);
  std::string ask_image, ask_question, ask_strategy = "talent", ask_gt;
  ask->add_option("--image", ask_image);
  ask->add_option("--question", ask_question)->required();
  ask->add_option("--strategy", ask_strategy);
  ask->add_option("--gt-table", ask_gt, "Ground-truth table text (perfect_ocr)");

  auto* serve = app.add_subcommand("serve", "Start the HTTP session service");
  ConfigFlags serve_flags(serve);
  std::string host = "127.0.0.1", session_dir, cors = "*";
  int port = 8080, ttl = 3600;
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--session-ttl", ttl, "Seconds");
  serve->add_option("--session-dir", session_dir);
  serve->add_option("--cors-origin", cors);

  auto* sweep = app.add_subcommand("sweep", "Run every (VLM, LLM) pair of a grid");
  ConfigFlags sweep_flags(sweep);
  std::string grid_path;
  sweep->add_option("--grid", grid_path, "JSON {\"vlm\": [...], \"llm\": [...]}")->required();

  auto* cache = app.add_subcommand("cache", "Response cache maintenance");
  cache->require_subcommand(1);
  auto* purge = cache->add_subcommand("purge", "Delete every cache entry");
  ConfigFlags purge_flags(purge);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*validate) return CmdValidate(validate_path, no_images, out, err);
    if (*ingest) return CmdIngest(ingest_in, ingest_out, out);
    if (*run) return CmdRun(run_flags, envp, out, err);
    if (*eval) return CmdEval(eval_flags, predictions_path, envp, out);
    if (*report) return CmdReport(report_inputs, report_output, out);
    if (*fit) return CmdFitScaling(points_path, fit_output, fit_listing, out);
    if (*ask) {
      return CmdAsk(ask_flags, ask_image, ask_question, ask_strategy, ask_gt, envp, out);
    }
    if (*serve) return CmdServe(serve_flags, host, port, ttl, session_dir, cors, envp, out);
    if (*sweep) return CmdSweep(sweep_flags, grid_path, envp, out, err);
    if (*purge) return CmdCachePurge(purge_flags, envp, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace talent::cli
