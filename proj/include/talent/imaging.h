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

#ifndef TALENT_IMAGING_H_
#define TALENT_IMAGING_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace talent {

// 8-bit RGB, row-major, no padding between rows.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  bool valid() const {
    return width >= 1 && height >= 1 &&
           pixels.size() == static_cast<std::size_t>(width) * height * 3;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

enum class ResolutionTarget { kR512, kR1024, kNative };

struct ResolutionPreset {
  ResolutionTarget target = ResolutionTarget::kR1024;
  bool allow_upscale = false;
  // Pads the scaled image onto a white target x target canvas.
  bool pad_to_square = false;

  friend bool operator==(const ResolutionPreset&,
                         const ResolutionPreset&) = default;
};

// "r512", "r1024", "native" (also accepts "512", "1024").
ResolutionPreset ParseResolution(std::string_view name);
std::string_view ToString(ResolutionTarget target);
// Pixel length of the longest side, 0 for native.
int TargetPixels(ResolutionTarget target);

// Decodes PNG or JPEG. Alpha is composited over white.
ImageBuffer DecodeImage(std::span<const std::uint8_t> bytes,
                        std::string_view source_name = "<memory>");
ImageBuffer LoadImage(const std::filesystem::path& path);

// Longest side becomes the preset's length, aspect ratio preserved.
// Downscaling uses area averaging, upscaling bilinear interpolation.
ImageBuffer ResizeToPreset(const ImageBuffer& image,
                           const ResolutionPreset& preset);

// Output dimensions ResizeToPreset would produce (before any padding).
std::pair<int, int> PresetDimensions(int width, int height,
                                     const ResolutionPreset& preset);

// Lossless PNG with fixed encoder settings (no filtering, zlib level 9,
// no ancillary chunks).
std::vector<std::uint8_t> EncodePng(const ImageBuffer& image);

// "data:image/png;base64,<EncodePng(image)>"
std::string ToDataUrl(const ImageBuffer& image);

inline constexpr std::string_view kPngDataUrlPrefix = "data:image/png;base64,";

}  // namespace talent

#endif  // TALENT_IMAGING_H_
