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

#ifndef HYPE_IMAGE_HPP_
#define HYPE_IMAGE_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace hype {

// Interleaved floating-point image, nominal range [0, 255].
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> pixels;

  Raster() = default;
  Raster(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), channels(c),
        pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  double& at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool operator==(const Raster&) const = default;
};

// PNG (any libpng-readable layout, decoded to gray or RGB) or binary
// PGM/PPM. Throws Error(kInput) for anything else.
Raster decode_image(std::span<const unsigned char> bytes);

// 8-bit PNG; values are rounded and clamped to [0, 255].
std::vector<unsigned char> encode_png(const Raster& raster);

}  // namespace hype

#endif  // HYPE_IMAGE_HPP_
