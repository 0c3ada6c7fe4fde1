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

#include "talent/batch.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "talent/error.h"

namespace talent {

using ordered_json = nlohmann::ordered_json;

std::vector<BatchJob> MakeJobs(const std::vector<SelectedItem>& items,
                               const std::vector<StrategyKind>& strategies) {
  std::vector<BatchJob> jobs;
  jobs.reserve(items.size() * strategies.size());
  for (const auto& item : items) {
    for (StrategyKind s : strategies) jobs.push_back({item.table, item.qa, s});
  }
  return jobs;
}

std::vector<BatchOutcome> RunBatch(const Pipeline& pipeline,
                                   const std::vector<BatchJob>& jobs,
                                   const BatchOptions& options) {
  std::vector<BatchOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  std::atomic<bool> stop{false};
  std::mutex error_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const BatchJob& job = jobs[i];
      BatchOutcome& out = outcomes[i];
      out.qa_id = job.qa->qa_id;
      out.strategy = job.strategy;
      const auto start = std::chrono::steady_clock::now();
      try {
        AnswerResult r = pipeline.Answer(job.strategy, *job.table, *job.qa,
                                         options.resolution);
        out.prediction = std::move(r.prediction);
        out.trace = std::move(r.trace);
      } catch (const std::exception& e) {
        out.error = e.what();
        if (options.fail_fast) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          stop.store(true);
        }
      }
      out.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start);
      const std::size_t done = finished.fetch_add(1) + 1;
      if (options.on_progress) options.on_progress(done, jobs.size());
    }
  };

  const int width = std::max(
      1, std::min<int>(options.width, static_cast<int>(std::max<std::size_t>(1, jobs.size()))));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(width));
  for (int w = 0; w < width; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
  return outcomes;
}

std::string PredictionLine(const BatchOutcome& o) {
  ordered_json j;
  j["qa_id"] = o.qa_id;
  j["strategy"] = ToString(o.strategy);
  if (o.prediction) {
    j["prediction"] = *o.prediction;
  } else {
    j["prediction"] = nullptr;
    j["error"] = o.error.value_or("unknown error");
  }
  j["trace"] = o.trace.Summary();
  return j.dump();
}

std::string TimingLine(const BatchOutcome& o) {
  ordered_json j;
  j["qa_id"] = o.qa_id;
  j["strategy"] = ToString(o.strategy);
  j["elapsed_ms"] = o.elapsed.count();
  ordered_json stages = ordered_json::array();
  for (const auto& s : o.trace.stages) {
    stages.push_back({{"stage", s.stage_name},
                      {"latency_ms", s.latency.count()},
                      {"cache_hit", s.cache_hit}});
  }
  j["stages"] = std::move(stages);
  return j.dump();
}

}  // namespace talent
