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

#include "talent/cache.h"

#include "talent/util.h"

namespace talent {

ResponseCache::ResponseCache(std::filesystem::path dir)
    : store_(std::move(dir), EntryStore::Layout::kSharded) {}

std::optional<CacheEntry> ResponseCache::Get(const std::string& digest) const {
  auto entry = store_.Get(digest);
  if (entry) {
    entry->response.from_cache = true;
    entry->response.latency = std::chrono::milliseconds(0);
  }
  return entry;
}

void ResponseCache::Put(const std::string& digest,
                        const CacheEntry& entry) const {
  store_.Put(digest, entry);
}

std::size_t ResponseCache::Purge() const { return store_.Purge(); }

CachingTransport::CachingTransport(TransportHandle inner,
                                   std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

ChatResponse CachingTransport::Send(const ChatRequest& request,
                                    const std::string& digest) {
  if (auto hit = cache_->Get(digest)) {
    ++hits_;
    return hit->response;
  }
  ++misses_;
  ChatResponse response = inner_->Send(request, digest);
  CacheEntry entry;
  entry.digest = digest;
  entry.model = request.endpoint.model;
  entry.created_at = UtcTimestamp();
  entry.response = response;
  entry.response.from_cache = false;
  entry.prompt_summary = PromptSummary(request);
  cache_->Put(digest, entry);
  return response;
}

TransportHandle WrapWithCache(TransportHandle inner,
                              std::shared_ptr<ResponseCache> cache) {
  return std::make_shared<CachingTransport>(std::move(inner), std::move(cache));
}

}  // namespace talent
