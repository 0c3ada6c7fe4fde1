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

// Wiring from a RunConfig to a working pipeline, and the batch run used by
// both the CLI and the service.

#ifndef TALENT_RUNNER_H_
#define TALENT_RUNNER_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "talent/batch.h"
#include "talent/cache.h"
#include "talent/config.h"
#include "talent/dataset.h"
#include "talent/eval.h"
#include "talent/model_client.h"
#include "talent/pipeline.h"
#include "talent/prompts.h"

namespace talent {

struct Harness {
  TransportHandle wire;                      // live, record or replay
  std::shared_ptr<CachingTransport> caching;  // null without cache-dir
  std::shared_ptr<ModelClient> client;
  std::shared_ptr<Pipeline> pipeline;
  PromptLibrary prompts;
  std::string transport_label;  // "replay", "live+cache", ...
};

// `wire` replaces the transport the config would build (tests, stubs).
Harness BuildHarness(const RunConfig& config, TransportHandle wire = nullptr,
                     Sleeper sleeper = nullptr);

RunEcho MakeRunEcho(const RunConfig& config, const DatasetManifest& manifest,
                    const Harness& harness);

struct RunResult {
  std::vector<BatchOutcome> outcomes;
  std::string predictions_jsonl;
  std::string timings_jsonl;
  std::optional<EvalReport> report;   // absent when nothing could be scored
  std::optional<std::string> report_error;
};

// Selects items, checks strategy preconditions, runs the batch and scores
// it. Item failures are recorded, not thrown, unless fail-fast is set.
RunResult ExecuteRun(const RunConfig& config, const DatasetManifest& manifest,
                     const Harness& harness,
                     std::function<void(std::size_t, std::size_t)> on_progress = nullptr);

// predictions.jsonl, timings.jsonl, and report.json + report.md when a
// report exists. Returns the files written.
std::vector<std::filesystem::path> WriteRunOutputs(
    const std::filesystem::path& output_dir, const RunResult& result);

}  // namespace talent

#endif  // TALENT_RUNNER_H_
