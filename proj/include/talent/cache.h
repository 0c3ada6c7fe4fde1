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

#ifndef TALENT_CACHE_H_
#define TALENT_CACHE_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "talent/entry_store.h"
#include "talent/model_client.h"

namespace talent {

// Content-addressed response cache at <dir>/<first two hex>/<digest>.json.
// Safe for concurrent readers and writers across threads and processes;
// the last writer wins on identical keys.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  // Entries come back with response.from_cache set.
  std::optional<CacheEntry> Get(const std::string& digest) const;
  void Put(const std::string& digest, const CacheEntry& entry) const;
  std::size_t Purge() const;

  const std::filesystem::path& dir() const { return store_.dir(); }

 private:
  EntryStore store_;
};

// Get-before-dispatch, put-after-success. Failures are never cached.
class CachingTransport : public Transport {
 public:
  CachingTransport(TransportHandle inner, std::shared_ptr<ResponseCache> cache);

  ChatResponse Send(const ChatRequest& request,
                    const std::string& digest) override;

  int hits() const { return hits_.load(); }
  int misses() const { return misses_.load(); }

 private:
  TransportHandle inner_;
  std::shared_ptr<ResponseCache> cache_;
  std::atomic<int> hits_{0};
  std::atomic<int> misses_{0};
};

TransportHandle WrapWithCache(TransportHandle inner,
                              std::shared_ptr<ResponseCache> cache);

}  // namespace talent

#endif  // TALENT_CACHE_H_
