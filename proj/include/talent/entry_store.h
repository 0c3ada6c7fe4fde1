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

// Persisted model responses, one canonical-JSON file per request digest.
// Shared by the response cache and the record/replay transports.

#ifndef TALENT_ENTRY_STORE_H_
#define TALENT_ENTRY_STORE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "talent/model_client.h"

namespace talent {

struct CacheEntry {
  std::string digest;
  std::string model;
  std::string created_at;
  ChatResponse response;  // latency is not persisted
  std::string prompt_summary;
};

bool IsValidDigest(std::string_view digest);

// {"created_at","digest","model","prompt_summary","response_text",
//  "usage":{"completion_tokens","prompt_tokens"}} with sorted keys, compact,
// newline-terminated. DecodeEntry(EncodeEntry(e)) round-trips and
// EncodeEntry(DecodeEntry(bytes)) == bytes for any accepted input produced
// by EncodeEntry.
std::string EncodeEntry(const CacheEntry& entry);
// Throws Error(kCorrupt) naming `origin` when the text is not a valid entry.
CacheEntry DecodeEntry(std::string_view text, std::string_view origin);

class EntryStore {
 public:
  enum class Layout {
    kFlat,     // <dir>/<digest>.json
    kSharded,  // <dir>/<first two hex>/<digest>.json
  };

  EntryStore(std::filesystem::path dir, Layout layout);

  std::filesystem::path PathFor(std::string_view digest) const;

  // Never throws on absence; throws Error(kCorrupt) for unreadable entries.
  std::optional<CacheEntry> Get(std::string_view digest) const;

  // Atomic (temp file + rename). Rejects entries whose digest differs from
  // `digest`.
  void Put(std::string_view digest, const CacheEntry& entry) const;

  // Removes every entry file; returns how many were removed.
  std::size_t Purge() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  Layout layout_;
};

}  // namespace talent

#endif  // TALENT_ENTRY_STORE_H_
