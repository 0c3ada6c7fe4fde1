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

#include "talent/rate_limiter.h"

#include <thread>

#include "talent/error.h"

namespace talent {

SlidingWindowLimiter::SlidingWindowLimiter(int max_events,
                                           Clock::duration window, NowFn now,
                                           SleepFn sleep)
    : max_events_(max_events),
      window_(window),
      now_(std::move(now)),
      sleep_(std::move(sleep)) {
  if (max_events_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "rate limit must be positive");
  }
  if (!now_) now_ = [] { return Clock::now(); };
  if (!sleep_) sleep_ = [](Clock::duration d) { std::this_thread::sleep_for(d); };
}

SlidingWindowLimiter::Clock::time_point SlidingWindowLimiter::Acquire() {
  for (;;) {
    Clock::duration wait{};
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto now = now_();
      // A grant at time g occupies the half-open window [g, g + window).
      while (!grants_.empty() && grants_.front() + window_ <= now) {
        grants_.pop_front();
      }
      if (static_cast<int>(grants_.size()) < max_events_) {
        grants_.push_back(now);
        return now;
      }
      wait = grants_.front() + window_ - now;
    }
    sleep_(wait);
  }
}

}  // namespace talent
