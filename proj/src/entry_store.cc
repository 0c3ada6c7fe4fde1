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

#include "talent/entry_store.h"

#include <system_error>

#include "json.hpp"
#include "talent/error.h"
#include "talent/util.h"

namespace talent {

using nlohmann::json;

bool IsValidDigest(std::string_view digest) {
  if (digest.size() != 64) return false;
  for (char c : digest) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::string EncodeEntry(const CacheEntry& e) {
  json j;
  j["digest"] = e.digest;
  j["model"] = e.model;
  j["created_at"] = e.created_at;
  j["response_text"] = e.response.text;
  j["usage"] = {{"prompt_tokens", e.response.prompt_tokens},
                {"completion_tokens", e.response.completion_tokens}};
  j["prompt_summary"] = e.prompt_summary;
  return j.dump() + "\n";
}

CacheEntry DecodeEntry(std::string_view text, std::string_view origin) {
  auto corrupt = [&](const std::string& why) {
    return Error(ErrorCode::kCorrupt,
                 "corrupt entry " + std::string(origin) + ": " + why);
  };
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw corrupt("not a JSON object");
  CacheEntry e;
  try {
    e.digest = j.at("digest").get<std::string>();
    e.model = j.at("model").get<std::string>();
    e.created_at = j.at("created_at").get<std::string>();
    e.response.text = j.at("response_text").get<std::string>();
    e.response.prompt_tokens = j.at("usage").at("prompt_tokens").get<int>();
    e.response.completion_tokens =
        j.at("usage").at("completion_tokens").get<int>();
    e.prompt_summary = j.at("prompt_summary").get<std::string>();
  } catch (const json::exception& ex) {
    throw corrupt(ex.what());
  }
  if (!IsValidDigest(e.digest)) throw corrupt("invalid digest field");
  return e;
}

EntryStore::EntryStore(std::filesystem::path dir, Layout layout)
    : dir_(std::move(dir)), layout_(layout) {}

std::filesystem::path EntryStore::PathFor(std::string_view digest) const {
  if (!IsValidDigest(digest)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid digest '" + std::string(digest) + "'");
  }
  const std::string file = std::string(digest) + ".json";
  if (layout_ == Layout::kFlat) return dir_ / file;
  return dir_ / std::string(digest.substr(0, 2)) / file;
}

std::optional<CacheEntry> EntryStore::Get(std::string_view digest) const {
  const auto path = PathFor(digest);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error&) {
    // Raced with a purge.
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    throw;
  }
  CacheEntry e = DecodeEntry(text, path.string());
  if (e.digest != digest) {
    throw Error(ErrorCode::kCorrupt,
                "corrupt entry " + path.string() + ": digest field mismatch");
  }
  return e;
}

void EntryStore::Put(std::string_view digest, const CacheEntry& entry) const {
  if (entry.digest != digest) {
    throw Error(ErrorCode::kInvalidArgument,
                "entry digest " + entry.digest + " does not match key " +
                    std::string(digest));
  }
  WriteFileAtomic(PathFor(digest), EncodeEntry(entry));
}

std::size_t EntryStore::Purge() const {
  std::size_t removed = 0;
  std::error_code ec;
  if (!std::filesystem::exists(dir_, ec)) return 0;
  for (auto it = std::filesystem::recursive_directory_iterator(dir_, ec);
       it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file()) continue;
    const auto name = it->path().filename().string();
    if (name.ends_with(".json") && IsValidDigest(name.substr(0, name.size() - 5))) {
      if (std::filesystem::remove(it->path(), ec)) ++removed;
    }
  }
  return removed;
}

}  // namespace talent
