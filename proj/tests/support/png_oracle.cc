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

#include "png_oracle.h"

#include <zlib.h>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace talent::testing {

namespace {

std::uint32_t Be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | p[3];
}

struct Chunk {
  std::string type;
  std::span<const std::uint8_t> data;
};

std::vector<Chunk> Chunks(std::span<const std::uint8_t> bytes) {
  static const std::uint8_t kSig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  if (bytes.size() < 8 || !std::equal(kSig, kSig + 8, bytes.begin())) {
    throw std::runtime_error("not a PNG");
  }
  std::vector<Chunk> out;
  std::size_t pos = 8;
  while (pos + 12 <= bytes.size()) {
    const std::uint32_t len = Be32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) throw std::runtime_error("truncated chunk");
    Chunk c;
    c.type.assign(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
    c.data = bytes.subspan(pos + 8, len);
    const std::uint32_t crc = Be32(&bytes[pos + 8 + len]);
    if (crc32(0, &bytes[pos + 4], len + 4) != crc) throw std::runtime_error("bad CRC");
    out.push_back(c);
    pos += 12 + len;
    if (c.type == "IEND") break;
  }
  return out;
}

int Paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

}  // namespace

std::vector<std::string> PngChunkTypes(std::span<const std::uint8_t> bytes) {
  std::vector<std::string> types;
  for (const auto& c : Chunks(bytes)) types.push_back(c.type);
  return types;
}

ImageBuffer OracleDecodePng(std::span<const std::uint8_t> bytes) {
  const auto chunks = Chunks(bytes);
  if (chunks.empty() || chunks[0].type != "IHDR" || chunks[0].data.size() != 13) {
    throw std::runtime_error("missing IHDR");
  }
  const auto* h = chunks[0].data.data();
  const int width = static_cast<int>(Be32(h));
  const int height = static_cast<int>(Be32(h + 4));
  const int depth = h[8], color = h[9], interlace = h[12];
  if (depth != 8 || (color != 2 && color != 6) || interlace != 0) {
    throw std::runtime_error("unsupported PNG format");
  }
  const int channels = color == 2 ? 3 : 4;
  std::vector<std::uint8_t> compressed;
  for (const auto& c : chunks) {
    if (c.type == "IDAT") compressed.insert(compressed.end(), c.data.begin(), c.data.end());
  }
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  std::vector<std::uint8_t> raw((stride + 1) * height);
  uLongf raw_len = raw.size();
  if (uncompress(raw.data(), &raw_len, compressed.data(), compressed.size()) != Z_OK ||
      raw_len != raw.size()) {
    throw std::runtime_error("inflate failed");
  }

  std::vector<std::uint8_t> prev(stride, 0), cur(stride);
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.pixels.reserve(static_cast<std::size_t>(width) * height * 3);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* line = &raw[(stride + 1) * y];
    const int filter = line[0];
    for (std::size_t x = 0; x < stride; ++x) {
      const int a = x >= static_cast<std::size_t>(channels) ? cur[x - channels] : 0;
      const int b = prev[x];
      const int c = x >= static_cast<std::size_t>(channels) ? prev[x - channels] : 0;
      int pred = 0;
      switch (filter) {
        case 0: pred = 0; break;
        case 1: pred = a; break;
        case 2: pred = b; break;
        case 3: pred = (a + b) / 2; break;
        case 4: pred = Paeth(a, b, c); break;
        default: throw std::runtime_error("bad filter type");
      }
      cur[x] = static_cast<std::uint8_t>(line[1 + x] + pred);
    }
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* px = &cur[static_cast<std::size_t>(x) * channels];
      for (int k = 0; k < 3; ++k) {
        int v = px[k];
        if (channels == 4) v = (v * px[3] + 255 * (255 - px[3]) + 127) / 255;
        img.pixels.push_back(static_cast<std::uint8_t>(v));
      }
    }
    prev.swap(cur);
  }
  return img;
}

}  // namespace talent::testing
