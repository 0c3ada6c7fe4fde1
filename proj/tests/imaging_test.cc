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

#include "talent/imaging.h"

#include <gtest/gtest.h>

#include <random>

#include "png_oracle.h"
#include "talent/error.h"
#include "talent/util.h"
#include "test_paths.h"

namespace talent {
namespace {

using testing::TestData;

ImageBuffer Gradient(int w, int h) {
  ImageBuffer img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto* p = &img.pixels[(static_cast<std::size_t>(y) * w + x) * 3];
      p[0] = static_cast<std::uint8_t>(x * 255 / std::max(1, w - 1));
      p[1] = static_cast<std::uint8_t>(y * 255 / std::max(1, h - 1));
      p[2] = static_cast<std::uint8_t>((x + y) % 256);
    }
  }
  return img;
}

// Independent rounding oracle: round-half-up of short * L / long.
int ExpectedShort(long long s, long long l, long long target) {
  return static_cast<int>(std::max(1LL, (2 * s * target + l) / (2 * l)));
}

TEST(Resolution, ParsesPresetNames) {
  EXPECT_EQ(ParseResolution("r512").target, ResolutionTarget::kR512);
  EXPECT_EQ(ParseResolution("1024").target, ResolutionTarget::kR1024);
  EXPECT_EQ(ParseResolution("native").target, ResolutionTarget::kNative);
  EXPECT_THROW(ParseResolution("r2048"), Error);
  EXPECT_EQ(TargetPixels(ResolutionTarget::kR512), 512);
}

TEST(PresetDimensions, Examples) {
  ResolutionPreset r1024;
  ResolutionPreset r512{ResolutionTarget::kR512};
  EXPECT_EQ(PresetDimensions(2000, 1000, r1024), std::make_pair(1024, 512));
  EXPECT_EQ(PresetDimensions(1000, 2000, r512), std::make_pair(256, 512));
  EXPECT_EQ(PresetDimensions(300, 200, r1024), std::make_pair(300, 200));
  ResolutionPreset up{ResolutionTarget::kR1024, true};
  EXPECT_EQ(PresetDimensions(300, 200, up), std::make_pair(1024, 683));
  EXPECT_EQ(PresetDimensions(5000, 3, r512), std::make_pair(512, 1));
  ResolutionPreset native{ResolutionTarget::kNative};
  EXPECT_EQ(PresetDimensions(3000, 7, native), std::make_pair(3000, 7));
}

TEST(ResizeToPreset, RandomCorpusHitsTargetAndKeepsAspect) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dim(1, 3000);
  for (int i = 0; i < 400; ++i) {
    const int w = dim(rng), h = dim(rng);
    for (auto target : {ResolutionTarget::kR512, ResolutionTarget::kR1024}) {
      const int L = TargetPixels(target);
      const auto [ow, oh] = PresetDimensions(w, h, {target});
      const int longest = std::max(w, h);
      if (longest <= L) {
        EXPECT_EQ(std::make_pair(ow, oh), std::make_pair(w, h));
        continue;
      }
      EXPECT_EQ(std::max(ow, oh), L) << w << "x" << h;
      const int short_in = std::min(w, h), short_out = std::min(ow, oh);
      EXPECT_EQ(short_out, ExpectedShort(short_in, longest, L)) << w << "x" << h;
      EXPECT_LE(std::abs(short_out - static_cast<double>(short_in) * L / longest), 1.0);
    }
  }
}

TEST(ResizeToPreset, ProducesPresetDimensionsAndIsIdempotent) {
  const ImageBuffer src = Gradient(1500, 900);
  const ImageBuffer once = ResizeToPreset(src, {ResolutionTarget::kR512});
  EXPECT_EQ(once.width, 512);
  EXPECT_EQ(once.height, 307);
  ASSERT_TRUE(once.valid());
  EXPECT_EQ(ResizeToPreset(once, {ResolutionTarget::kR512}), once);
}

TEST(ResizeToPreset, AreaAverageOfUniformImageIsUniform) {
  ImageBuffer src{2048, 1024, std::vector<std::uint8_t>(2048 * 1024 * 3, 77)};
  const auto out = ResizeToPreset(src, {});
  for (auto v : out.pixels) ASSERT_EQ(v, 77);
}

TEST(ResizeToPreset, PadToSquareUsesWhite) {
  ResolutionPreset p{ResolutionTarget::kR512, false, true};
  ImageBuffer src{1024, 512, std::vector<std::uint8_t>(1024 * 512 * 3, 0)};
  const auto out = ResizeToPreset(src, p);
  EXPECT_EQ(out.width, 512);
  EXPECT_EQ(out.height, 512);
  // Content is centered vertically between white bands.
  EXPECT_EQ(out.pixels.front(), 255);
  EXPECT_EQ(out.pixels.back(), 255);
  EXPECT_EQ(out.pixels[(256 * 512) * 3], 0);
}

TEST(Png, EncoderOutputDecodesIdenticallyWithOracle) {
  const ImageBuffer img = Gradient(37, 23);
  const auto png = EncodePng(img);
  EXPECT_EQ(testing::OracleDecodePng(png), img);
  EXPECT_EQ(DecodeImage(png), img);
  const auto chunks = testing::PngChunkTypes(png);
  ASSERT_GE(chunks.size(), 3u);
  EXPECT_EQ(chunks.front(), "IHDR");
  EXPECT_EQ(chunks.back(), "IEND");
  for (std::size_t i = 1; i + 1 < chunks.size(); ++i) EXPECT_EQ(chunks[i], "IDAT");
}

TEST(Png, EncodingIsDeterministic) {
  const ImageBuffer img = Gradient(64, 48);
  EXPECT_EQ(EncodePng(img), EncodePng(img));
  const std::string url = ToDataUrl(img);
  EXPECT_EQ(url.rfind(kPngDataUrlPrefix, 0), 0u);
}

TEST(Decode, AlphaIsCompositedOverWhite) {
  const ImageBuffer img = LoadImage(TestData("images/alpha.png"));
  ASSERT_EQ(img.width, 4);
  const auto px = [&](int x) {
    return std::vector<int>(img.pixels.begin() + x * 3, img.pixels.begin() + x * 3 + 3);
  };
  EXPECT_EQ(px(0), (std::vector<int>{255, 255, 255}));
  EXPECT_EQ(px(1), (std::vector<int>{0, 0, 0}));
  // (v*a + 255*(255-a) + 127) / 255 with a = 128
  EXPECT_EQ(px(2), (std::vector<int>{177, 152, 127}));
}

TEST(Decode, Jpeg) {
  const ImageBuffer img = LoadImage(TestData("images/solid.jpg"));
  EXPECT_EQ(img.width, 40);
  EXPECT_EQ(img.height, 20);
  EXPECT_NEAR(img.pixels[0], 200, 6);
  EXPECT_NEAR(img.pixels[1], 30, 6);
  EXPECT_NEAR(img.pixels[2], 60, 6);
}

TEST(Decode, CorruptAndUnknownInputsNameTheSource) {
  for (const char* name : {"images/corrupt.png", "mini/manifest.jsonl"}) {
    try {
      LoadImage(TestData(name));
      FAIL() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDecode);
      EXPECT_NE(std::string(e.what()).find(std::filesystem::path(name).filename().string()),
                std::string::npos)
          << e.what();
    }
  }
}

}  // namespace
}  // namespace talent
