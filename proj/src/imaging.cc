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

#include <png.h>
#include <setjmp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "talent/error.h"
#include "talent/util.h"

namespace talent {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G',
                                           0x0d, 0x0a, 0x1a, 0x0a};

bool LooksLikePng(std::span<const std::uint8_t> b) {
  return b.size() >= 8 && std::memcmp(b.data(), kPngSignature, 8) == 0;
}

bool LooksLikeJpeg(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xff && b[1] == 0xd8 && b[2] == 0xff;
}

[[noreturn]] void DecodeFail(std::string_view source, const std::string& why) {
  throw Error(ErrorCode::kDecode,
              "cannot decode image " + std::string(source) + ": " + why);
}

ImageBuffer DecodePng(std::span<const std::uint8_t> bytes,
                      std::string_view source) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    DecodeFail(source, image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    DecodeFail(source, "zero-dimension image");
  }
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    std::string why = image.message;
    png_image_free(&image);
    DecodeFail(source, why);
  }
  ImageBuffer out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  for (std::size_t i = 0, n = out.pixels.size() / 3; i < n; ++i) {
    const unsigned a = rgba[i * 4 + 3];
    for (int c = 0; c < 3; ++c) {
      const unsigned v = rgba[i * 4 + c];
      // Composite over white, rounded to nearest.
      out.pixels[i * 3 + c] =
          static_cast<std::uint8_t>((v * a + 255u * (255u - a) + 127u) / 255u);
    }
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  longjmp(err->jump, 1);
}

ImageBuffer DecodeJpeg(std::span<const std::uint8_t> bytes,
                       std::string_view source) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = JpegErrorExit;
  jerr.message[0] = '\0';
  ImageBuffer out;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    DecodeFail(source, jerr.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  if (cinfo.output_width == 0 || cinfo.output_height == 0) {
    jpeg_destroy_decompress(&cinfo);
    DecodeFail(source, "zero-dimension image");
  }
  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() + static_cast<std::size_t>(
                                           cinfo.output_scanline) *
                                           out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

// Contribution of source samples to one output sample along an axis.
struct Tap {
  int first = 0;
  std::vector<double> weights;
};

// Area-averaging taps when shrinking, bilinear taps when growing.
std::vector<Tap> AxisTaps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int o = 0; o < dst; ++o) {
    Tap& tap = taps[o];
    if (scale >= 1.0) {
      const double lo = o * scale;
      const double hi = std::min<double>(src, (o + 1) * scale);
      const int first = static_cast<int>(std::floor(lo));
      const int last = std::min(src - 1, static_cast<int>(std::ceil(hi)) - 1);
      tap.first = first;
      for (int i = first; i <= last; ++i) {
        const double overlap = std::min<double>(i + 1, hi) - std::max<double>(i, lo);
        tap.weights.push_back(std::max(0.0, overlap) / (hi - lo));
      }
    } else {
      double x = (o + 0.5) * scale - 0.5;
      x = std::clamp(x, 0.0, static_cast<double>(src - 1));
      const int i0 = static_cast<int>(std::floor(x));
      const int i1 = std::min(i0 + 1, src - 1);
      const double f = x - i0;
      tap.first = i0;
      tap.weights.push_back(1.0 - f);
      if (i1 != i0) tap.weights.push_back(f);
    }
  }
  return taps;
}

ImageBuffer Resample(const ImageBuffer& in, int out_w, int out_h) {
  const auto htaps = AxisTaps(in.width, out_w);
  const auto vtaps = AxisTaps(in.height, out_h);

  // Horizontal pass: in.height rows of out_w pixels.
  std::vector<double> mid(static_cast<std::size_t>(out_w) * in.height * 3);
  for (int y = 0; y < in.height; ++y) {
    const std::uint8_t* row = in.pixels.data() + static_cast<std::size_t>(y) * in.width * 3;
    for (int x = 0; x < out_w; ++x) {
      const Tap& tap = htaps[x];
      double acc[3] = {0, 0, 0};
      for (std::size_t k = 0; k < tap.weights.size(); ++k) {
        const std::uint8_t* px = row + static_cast<std::size_t>(tap.first + k) * 3;
        for (int c = 0; c < 3; ++c) acc[c] += tap.weights[k] * px[c];
      }
      double* dst = mid.data() + (static_cast<std::size_t>(y) * out_w + x) * 3;
      for (int c = 0; c < 3; ++c) dst[c] = acc[c];
    }
  }

  ImageBuffer out;
  out.width = out_w;
  out.height = out_h;
  out.pixels.resize(static_cast<std::size_t>(out_w) * out_h * 3);
  for (int y = 0; y < out_h; ++y) {
    const Tap& tap = vtaps[y];
    for (int x = 0; x < out_w; ++x) {
      double acc[3] = {0, 0, 0};
      for (std::size_t k = 0; k < tap.weights.size(); ++k) {
        const double* src =
            mid.data() + (static_cast<std::size_t>(tap.first + k) * out_w + x) * 3;
        for (int c = 0; c < 3; ++c) acc[c] += tap.weights[k] * src[c];
      }
      std::uint8_t* dst = out.pixels.data() + (static_cast<std::size_t>(y) * out_w + x) * 3;
      for (int c = 0; c < 3; ++c) {
        dst[c] = static_cast<std::uint8_t>(
            std::clamp(std::lround(acc[c]), 0l, 255l));
      }
    }
  }
  return out;
}

ImageBuffer PadToSquare(const ImageBuffer& in, int side) {
  if (in.width == side && in.height == side) return in;
  ImageBuffer out;
  out.width = std::max(side, in.width);
  out.height = std::max(side, in.height);
  out.pixels.assign(static_cast<std::size_t>(out.width) * out.height * 3, 255);
  const int ox = (out.width - in.width) / 2;
  const int oy = (out.height - in.height) / 2;
  for (int y = 0; y < in.height; ++y) {
    std::memcpy(out.pixels.data() +
                    (static_cast<std::size_t>(y + oy) * out.width + ox) * 3,
                in.pixels.data() + static_cast<std::size_t>(y) * in.width * 3,
                static_cast<std::size_t>(in.width) * 3);
  }
  return out;
}

void PngWriteToVector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void PngFlushNoop(png_structp) {}

}  // namespace

ResolutionPreset ParseResolution(std::string_view name) {
  ResolutionPreset p;
  if (name == "r512" || name == "512") {
    p.target = ResolutionTarget::kR512;
  } else if (name == "r1024" || name == "1024") {
    p.target = ResolutionTarget::kR1024;
  } else if (name == "native") {
    p.target = ResolutionTarget::kNative;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown resolution preset '" + std::string(name) +
                    "' (expected r512, r1024 or native)");
  }
  return p;
}

std::string_view ToString(ResolutionTarget target) {
  switch (target) {
    case ResolutionTarget::kR512: return "r512";
    case ResolutionTarget::kR1024: return "r1024";
    case ResolutionTarget::kNative: return "native";
  }
  return "native";
}

int TargetPixels(ResolutionTarget target) {
  switch (target) {
    case ResolutionTarget::kR512: return 512;
    case ResolutionTarget::kR1024: return 1024;
    case ResolutionTarget::kNative: return 0;
  }
  return 0;
}

ImageBuffer DecodeImage(std::span<const std::uint8_t> bytes,
                        std::string_view source_name) {
  if (LooksLikePng(bytes)) return DecodePng(bytes, source_name);
  if (LooksLikeJpeg(bytes)) return DecodeJpeg(bytes, source_name);
  DecodeFail(source_name, "unsupported format (expected PNG or JPEG)");
}

ImageBuffer LoadImage(const std::filesystem::path& path) {
  std::string raw;
  try {
    raw = ReadFile(path);
  } catch (const Error&) {
    throw Error(ErrorCode::kIo, "cannot read image " + path.string());
  }
  return DecodeImage(
      std::span<const std::uint8_t>(
          reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()),
      path.string());
}

std::pair<int, int> PresetDimensions(int width, int height,
                                     const ResolutionPreset& preset) {
  const int target = TargetPixels(preset.target);
  const int longest = std::max(width, height);
  if (target == 0 || longest == target) return {width, height};
  if (longest < target && !preset.allow_upscale) return {width, height};
  const int shortest = std::min(width, height);
  // round(shortest * target / longest), half-up, in exact integer arithmetic.
  const long long scaled =
      (2LL * shortest * target + longest) / (2LL * longest);
  const int short_out = static_cast<int>(std::max(1LL, scaled));
  return width >= height ? std::pair{target, short_out}
                         : std::pair{short_out, target};
}

ImageBuffer ResizeToPreset(const ImageBuffer& image,
                           const ResolutionPreset& preset) {
  if (!image.valid()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid image buffer");
  }
  auto [w, h] = PresetDimensions(image.width, image.height, preset);
  ImageBuffer out =
      (w == image.width && h == image.height) ? image : Resample(image, w, h);
  if (preset.pad_to_square && preset.target != ResolutionTarget::kNative) {
    out = PadToSquare(out, TargetPixels(preset.target));
  }
  return out;
}

std::vector<std::uint8_t> EncodePng(const ImageBuffer& image) {
  if (!image.valid()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid image buffer");
  }
  std::vector<std::uint8_t> out;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, PngWriteToVector, PngFlushNoop);
  png_set_compression_level(png, 9);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_BASE,
               PNG_FILTER_TYPE_BASE);
  png_write_info(png, info);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    rows[y] = const_cast<png_bytep>(image.pixels.data()) +
              static_cast<std::size_t>(y) * image.width * 3;
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::string ToDataUrl(const ImageBuffer& image) {
  return std::string(kPngDataUrlPrefix) + Base64Encode(EncodePng(image));
}

}  // namespace talent
