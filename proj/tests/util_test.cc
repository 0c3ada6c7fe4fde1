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

#include "talent/util.h"

#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "talent/error.h"
#include "test_paths.h"

namespace talent {
namespace {

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Base64, Rfc4648Vectors) {
  const std::pair<const char*, const char*> cases[] = {
      {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},
      {"foo", "Zm9v"},  {"foob", "Zm9vYg=="},  {"fooba", "Zm9vYmE="},
      {"foobar", "Zm9vYmFy"}};
  for (const auto& [plain, encoded] : cases) {
    EXPECT_EQ(Base64Encode(std::string_view(plain)), encoded);
    const auto back = Base64Decode(encoded);
    EXPECT_EQ(std::string(back.begin(), back.end()), plain);
  }
}

TEST(Base64, RejectsMalformed) {
  for (const char* bad : {"Zm9", "Zm9v!", "Z===", "Zg==Zg=="}) {
    try {
      Base64Decode(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDecode) << bad;
    }
  }
}

TEST(Base64, BinaryRoundTrip) {
  std::vector<std::uint8_t> bytes(1000);
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(i * 37);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 999u, 1000u}) {
    std::span<const std::uint8_t> s(bytes.data(), n);
    const auto back = Base64Decode(Base64Encode(s));
    EXPECT_TRUE(std::equal(back.begin(), back.end(), s.begin(), s.end())) << n;
  }
}

TEST(FormatHundredths, Pads) {
  EXPECT_EQ(FormatHundredths(8113), "81.13");
  EXPECT_EQ(FormatHundredths(7000), "70.00");
  EXPECT_EQ(FormatHundredths(5), "0.05");
  EXPECT_EQ(FormatHundredths(10000), "100.00");
}

TEST(WriteFileAtomic, ConcurrentWritersLeaveOneCompleteFile) {
  testing::TempDir dir;
  const auto path = dir / "f.txt";
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) WriteFileAtomic(path, std::string(4096, 'a' + t));
    });
  }
  for (auto& th : threads) th.join();
  const std::string text = ReadFile(path);
  ASSERT_EQ(text.size(), 4096u);
  EXPECT_EQ(std::set<char>(text.begin(), text.end()).size(), 1u);
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1);
}

TEST(ReadFile, MissingIsIoError) {
  try {
    ReadFile("/nonexistent/file");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(UtcTimestamp, Shape) {
  const std::string ts = UtcTimestamp();
  ASSERT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts[4], '-');
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts.back(), 'Z');
}

}  // namespace
}  // namespace talent
