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

#include "hype/masks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iterator>
#include <memory>
#include <mutex>
#include <utility>

#include <fftw3.h>

#include "hype/error.hpp"

namespace hype {
namespace {

// FFTW's planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Forward and inverse 2-D real transforms over one h x w plane.
class PlaneTransform {
 public:
  PlaneTransform(int height, int width)
      : height_(height), width_(width),
        spectrum_width_(width / 2 + 1),
        real_(static_cast<double*>(fftw_malloc(sizeof(double) * height * width))),
        complex_(static_cast<fftw_complex*>(
            fftw_malloc(sizeof(fftw_complex) * height * spectrum_width_))) {
    std::lock_guard lock(planner_mutex());
    forward_.reset(fftw_plan_dft_r2c_2d(height, width, real_.get(), complex_.get(), FFTW_ESTIMATE));
    inverse_.reset(fftw_plan_dft_c2r_2d(height, width, complex_.get(), real_.get(), FFTW_ESTIMATE));
  }

  std::size_t spectrum_size() const {
    return static_cast<std::size_t>(height_) * spectrum_width_;
  }

  std::vector<std::complex<double>> forward(const std::vector<double>& plane) {
    std::copy(plane.begin(), plane.end(), real_.get());
    fftw_execute(forward_.get());
    std::vector<std::complex<double>> out(spectrum_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {complex_[i][0], complex_[i][1]};
    return out;
  }

  std::vector<double> inverse(const std::vector<std::complex<double>>& spectrum) {
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
      complex_[i][0] = spectrum[i].real();
      complex_[i][1] = spectrum[i].imag();
    }
    fftw_execute(inverse_.get());
    const double norm = 1.0 / (static_cast<double>(height_) * width_);
    std::vector<double> out(static_cast<std::size_t>(height_) * width_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_[i] * norm;
    return out;
  }

 private:
  int height_;
  int width_;
  int spectrum_width_;
  FftwBuffer<double> real_;
  FftwBuffer<fftw_complex> complex_;
  Plan forward_;
  Plan inverse_;
};

std::vector<double> extract_plane(const Raster& r, int channel) {
  std::vector<double> plane(static_cast<std::size_t>(r.width) * r.height);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      plane[static_cast<std::size_t>(y) * r.width + x] = r.at(x, y, channel);
    }
  }
  return plane;
}

struct TileRect {
  int x, y, w, h;
};

}  // namespace

std::string_view to_string(MaskGenerator generator) {
  return generator == MaskGenerator::kPatchShuffle ? "patch_shuffle" : "phase_scramble";
}

MaskGenerator parse_mask_generator(std::string_view text) {
  if (text == "patch_shuffle") return MaskGenerator::kPatchShuffle;
  if (text == "phase_scramble") return MaskGenerator::kPhaseScramble;
  fail(ErrorKind::kInput, "unknown mask generator '" + std::string(text) + "'");
}

Raster patch_shuffle(const Raster& stimulus, Rng& rng, int tile) {
  if (tile <= 0) fail(ErrorKind::kInput, "tile size must be positive");
  // Group tiles by their (w, h) so only congruent tiles trade places.
  std::vector<std::pair<std::pair<int, int>, std::vector<TileRect>>> groups;
  for (int y = 0; y < stimulus.height; y += tile) {
    for (int x = 0; x < stimulus.width; x += tile) {
      TileRect rect{x, y, std::min(tile, stimulus.width - x), std::min(tile, stimulus.height - y)};
      auto key = std::pair{rect.w, rect.h};
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const auto& g) { return g.first == key; });
      if (it == groups.end()) {
        groups.push_back({key, {}});
        it = std::prev(groups.end());
      }
      it->second.push_back(rect);
    }
  }
  Raster out(stimulus.width, stimulus.height, stimulus.channels);
  for (auto& [shape, rects] : groups) {
    std::vector<TileRect> sources = rects;
    rng.shuffle(std::span(sources));
    for (std::size_t i = 0; i < rects.size(); ++i) {
      const TileRect& dst = rects[i];
      const TileRect& src = sources[i];
      for (int dy = 0; dy < dst.h; ++dy) {
        for (int dx = 0; dx < dst.w; ++dx) {
          for (int c = 0; c < stimulus.channels; ++c) {
            out.at(dst.x + dx, dst.y + dy, c) = stimulus.at(src.x + dx, src.y + dy, c);
          }
        }
      }
    }
  }
  return out;
}

Raster phase_scramble(const Raster& stimulus, Rng& rng) {
  if (stimulus.width <= 0 || stimulus.height <= 0) {
    fail(ErrorKind::kInput, "cannot scramble an empty image");
  }
  PlaneTransform fft(stimulus.height, stimulus.width);

  // The phases of a real white-noise field are Hermitian-consistent, so the
  // scrambled spectrum still inverts to a real image.
  std::vector<double> noise(static_cast<std::size_t>(stimulus.width) * stimulus.height);
  for (double& v : noise) v = rng.uniform01();
  const std::vector<std::complex<double>> noise_spectrum = fft.forward(noise);

  Raster out(stimulus.width, stimulus.height, stimulus.channels);
  for (int c = 0; c < stimulus.channels; ++c) {
    std::vector<std::complex<double>> spectrum = fft.forward(extract_plane(stimulus, c));
    for (std::size_t i = 1; i < spectrum.size(); ++i) {
      const double magnitude = std::abs(spectrum[i]);
      const double noise_magnitude = std::abs(noise_spectrum[i]);
      const std::complex<double> phase =
          noise_magnitude > 0.0 ? noise_spectrum[i] / noise_magnitude : std::complex<double>(1.0);
      spectrum[i] = magnitude * phase;
    }
    const std::vector<double> plane = fft.inverse(spectrum);
    for (int y = 0; y < stimulus.height; ++y) {
      for (int x = 0; x < stimulus.width; ++x) {
        out.at(x, y, c) = plane[static_cast<std::size_t>(y) * stimulus.width + x];
      }
    }
  }
  return out;
}

MaskSet generate_masks(std::string image_id, const Raster& stimulus, MaskGenerator generator,
                       uint64_t seed) {
  if (stimulus.width <= 0 || stimulus.height <= 0 || stimulus.channels <= 0) {
    fail(ErrorKind::kInput, "stimulus has no pixels");
  }
  MaskSet set;
  set.stimulus_image_id = std::move(image_id);
  set.generator = generator;
  set.seed = seed;
  for (int i = 0; i < kMasksPerStimulus; ++i) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(i)));
    set.masks.push_back(generator == MaskGenerator::kPatchShuffle
                            ? patch_shuffle(stimulus, rng)
                            : phase_scramble(stimulus, rng));
  }
  return set;
}

MaskSet generate_masks(std::string image_id, std::span<const unsigned char> image_bytes,
                       MaskGenerator generator, uint64_t seed) {
  return generate_masks(std::move(image_id), decode_image(image_bytes), generator, seed);
}

}  // namespace hype
