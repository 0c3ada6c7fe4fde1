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

#ifndef TALENT_RATE_LIMITER_H_
#define TALENT_RATE_LIMITER_H_

#include <chrono>
#include <deque>
#include <functional>
#include <mutex>

namespace talent {

// Sliding-window limiter: at most `max_events` grants in any `window`.
// Acquire() blocks until a slot frees up. The clock and sleep function are
// injectable so tests can run on simulated time.
class SlidingWindowLimiter {
 public:
  using Clock = std::chrono::steady_clock;
  using NowFn = std::function<Clock::time_point()>;
  using SleepFn = std::function<void(Clock::duration)>;

  SlidingWindowLimiter(int max_events, Clock::duration window,
                       NowFn now = nullptr, SleepFn sleep = nullptr);

  // Returns the time at which the grant was recorded.
  Clock::time_point Acquire();

 private:
  const int max_events_;
  const Clock::duration window_;
  NowFn now_;
  SleepFn sleep_;
  std::mutex mu_;
  std::deque<Clock::time_point> grants_;
};

}  // namespace talent

#endif  // TALENT_RATE_LIMITER_H_
