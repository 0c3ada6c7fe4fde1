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

#include "talent/runner.h"

#include "talent/error.h"
#include "talent/transport.h"
#include "talent/util.h"

namespace talent {

Harness BuildHarness(const RunConfig& config, TransportHandle wire,
                     Sleeper sleeper) {
  Harness h;
  const TransportMode mode = config.transport_mode();
  h.wire = wire ? wire : TransportOf(mode);
  h.transport_label = std::string(ToString(mode.kind));
  TransportHandle top = h.wire;
  if (config.cache_dir) {
    h.caching = std::make_shared<CachingTransport>(
        h.wire, std::make_shared<ResponseCache>(*config.cache_dir));
    top = h.caching;
    h.transport_label += "+cache";
  }
  h.client = std::make_shared<ModelClient>(top, RetryPolicy{}, std::move(sleeper),
                                           config.seed.value_or(0));
  h.prompts = config.prompts ? PromptLibrary::Load(*config.prompts)
                             : PromptLibrary::Default();
  PipelineOptions options;
  options.concurrent_dual = config.concurrent_dual;
  h.pipeline = std::make_shared<Pipeline>(h.client, config.vlm, config.llm,
                                          h.prompts, options);
  return h;
}

RunEcho MakeRunEcho(const RunConfig& config, const DatasetManifest& manifest,
                    const Harness& harness) {
  RunEcho echo;
  echo.dataset_name = manifest.name;
  echo.dataset_kind = manifest.kind;
  echo.resolution = std::string(ToString(config.resolution.target));
  bool vlm = false, llm = false;
  for (StrategyKind s : config.strategies) {
    vlm = vlm || UsesVlm(s);
    llm = llm || UsesLlm(s);
  }
  if (vlm) echo.vlm = EndpointEcho{config.vlm.name, config.vlm.model, config.vlm.model_size_b};
  if (llm) echo.llm = EndpointEcho{config.llm.name, config.llm.model, config.llm.model_size_b};
  echo.prompt_library_sha256 = harness.prompts.Hash();
  echo.transport = harness.transport_label;
  echo.effective_config = EffectiveConfig(config);
  return echo;
}

RunResult ExecuteRun(const RunConfig& config, const DatasetManifest& manifest,
                     const Harness& harness,
                     std::function<void(std::size_t, std::size_t)> on_progress) {
  const auto items = SelectItems(manifest, config.selection());
  CheckStrategiesAgainstItems(config, items);
  const auto jobs = MakeJobs(items, config.strategies);

  BatchOptions options;
  options.width = config.concurrency;
  options.fail_fast = config.fail_fast;
  options.resolution = config.resolution;
  options.on_progress = std::move(on_progress);

  RunResult result;
  result.outcomes = RunBatch(*harness.pipeline, jobs, options);

  std::vector<Prediction> predictions;
  for (const auto& o : result.outcomes) {
    result.predictions_jsonl += PredictionLine(o) + "\n";
    result.timings_jsonl += TimingLine(o) + "\n";
    predictions.push_back({o.qa_id, o.strategy, o.prediction, o.error});
  }
  try {
    result.report = Evaluate(predictions, manifest, config.policy,
                             MakeRunEcho(config, manifest, harness));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyEvaluation) throw;
    result.report_error = e.what();
  }
  return result;
}

std::vector<std::filesystem::path> WriteRunOutputs(
    const std::filesystem::path& output_dir, const RunResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create output dir " + output_dir.string() +
                                    ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  auto put = [&](const char* name, const std::string& text) {
    const auto path = output_dir / name;
    WriteFileAtomic(path, text);
    written.push_back(path);
  };
  put("predictions.jsonl", result.predictions_jsonl);
  put("timings.jsonl", result.timings_jsonl);
  if (result.report) {
    put("report.json", ReportToJson(*result.report));
    put("report.md", RenderMarkdown(*result.report));
  }
  return written;
}

}  // namespace talent
