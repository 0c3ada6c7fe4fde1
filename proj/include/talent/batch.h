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

#ifndef TALENT_BATCH_H_
#define TALENT_BATCH_H_

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "talent/dataset.h"
#include "talent/pipeline.h"

namespace talent {

struct BatchJob {
  const TableRecord* table = nullptr;
  const QAPair* qa = nullptr;
  StrategyKind strategy = StrategyKind::kTalent;
};

// Cross product of items and strategies, item-major.
std::vector<BatchJob> MakeJobs(const std::vector<SelectedItem>& items,
                               const std::vector<StrategyKind>& strategies);

struct BatchOutcome {
  std::string qa_id;
  StrategyKind strategy = StrategyKind::kTalent;
  std::optional<std::string> prediction;
  std::optional<std::string> error;  // set iff prediction is not
  PipelineTrace trace;
  std::chrono::milliseconds elapsed{0};
};

struct BatchOptions {
  int width = 4;
  bool fail_fast = false;
  ResolutionPreset resolution;
  // Called after each finished job with (finished, total). May be invoked
  // from worker threads.
  std::function<void(std::size_t, std::size_t)> on_progress;
};

// Runs every job on a pool of `width` workers. Outcomes come back in job
// order whatever the completion order. With fail_fast the first failure
// stops dispatch and is rethrown once in-flight jobs finish; otherwise
// failures are recorded per job.
std::vector<BatchOutcome> RunBatch(const Pipeline& pipeline,
                                   const std::vector<BatchJob>& jobs,
                                   const BatchOptions& options);

// One predictions.jsonl line (no trailing newline):
//   {"qa_id","strategy","prediction","trace":{...}} and "error" on failure.
// Contains nothing time- or cache-dependent.
std::string PredictionLine(const BatchOutcome& outcome);
// One timings.jsonl line: elapsed time plus per-stage latency and cache hits.
std::string TimingLine(const BatchOutcome& outcome);

}  // namespace talent

#endif  // TALENT_BATCH_H_
