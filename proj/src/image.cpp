// Copyright 2026 The hype-bench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hype/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include <png.h>

#include "hype/error.hpp"

namespace hype {
namespace {

constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(std::span<const unsigned char> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

Raster decode_png(std::span<const unsigned char> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(ErrorKind::kInput, std::string("undecodable PNG: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    fail(ErrorKind::kInput, "undecodable PNG: " + message);
  }
  Raster raster(static_cast<int>(image.width), static_cast<int>(image.height), channels);
  std::copy(buffer.begin(), buffer.end(), raster.pixels.begin());
  return raster;
}

// Binary PGM (P5) or PPM (P6) with maxval <= 255.
Raster decode_pnm(std::span<const unsigned char> bytes) {
  std::size_t pos = 2;
  auto next_int = [&]() -> long {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    long value = 0;
    int digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) && digits < 9) {
      value = value * 10 + (bytes[pos] - '0');
      ++pos;
      ++digits;
    }
    if (digits == 0) fail(ErrorKind::kInput, "undecodable PNM header");
    return value;
  };
  const int channels = bytes[1] == '6' ? 3 : 1;
  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    fail(ErrorKind::kInput, "unsupported PNM dimensions or depth");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t needed = static_cast<std::size_t>(width) * height * channels;
  if (pos > bytes.size() || bytes.size() - pos < needed) {
    fail(ErrorKind::kInput, "truncated PNM raster");
  }
  Raster raster(static_cast<int>(width), static_cast<int>(height), channels);
  const double scale = 255.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < needed; ++i) raster.pixels[i] = bytes[pos + i] * scale;
  return raster;
}

}  // namespace

Raster decode_image(std::span<const unsigned char> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes);
  }
  fail(ErrorKind::kInput, "unrecognized image format");
}

std::vector<unsigned char> encode_png(const Raster& raster) {
  if (raster.channels != 1 && raster.channels != 3) {
    fail(ErrorKind::kInput, "PNG encoding supports gray or RGB rasters");
  }
  std::vector<unsigned char> pixels(raster.pixels.size());
  std::transform(raster.pixels.begin(), raster.pixels.end(), pixels.begin(), [](double v) {
    return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
  });
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width);
  image.height = static_cast<png_uint_32>(raster.height);
  image.format = raster.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    fail(ErrorKind::kInput, std::string("PNG encode failed: ") + image.message);
  }
  std::vector<unsigned char> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    fail(ErrorKind::kInput, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace hype
