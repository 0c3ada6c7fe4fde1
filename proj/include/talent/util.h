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

#ifndef TALENT_UTIL_H_
#define TALENT_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace talent {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

std::string Base64Encode(std::span<const std::uint8_t> bytes);
std::string Base64Encode(std::string_view bytes);
// Throws Error(kDecode) on malformed input.
std::vector<std::uint8_t> Base64Decode(std::string_view text);

std::string ReadFile(const std::filesystem::path& path);

// Writes `contents` to a temporary sibling and renames it over `path`, so
// readers observe either the old file or the complete new one.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

// UTC wall-clock time, "YYYY-MM-DDTHH:MM:SSZ".
std::string UtcTimestamp();

// Random lowercase hex id with `bytes` bytes of entropy.
std::string RandomHexId(std::size_t bytes = 16);

// Formats hundredths as a fixed two-decimal string ("8113" -> "81.13").
std::string FormatHundredths(std::int64_t hundredths);

}  // namespace talent

#endif  // TALENT_UTIL_H_
