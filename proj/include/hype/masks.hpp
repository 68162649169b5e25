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

// Post-stimulus noise masks. Four masks follow every timed stimulus; each is
// derived from the stimulus itself so that it matches its size and low-level
// statistics while destroying its structure.

#ifndef HYPE_MASKS_HPP_
#define HYPE_MASKS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hype/image.hpp"
#include "hype/random.hpp"

namespace hype {

inline constexpr int kMasksPerStimulus = 4;
inline constexpr int kMaskTileSize = 8;

enum class MaskGenerator { kPatchShuffle, kPhaseScramble };

std::string_view to_string(MaskGenerator generator);
MaskGenerator parse_mask_generator(std::string_view text);

struct MaskSet {
  std::string stimulus_image_id;
  std::vector<Raster> masks;
  MaskGenerator generator = MaskGenerator::kPatchShuffle;
  uint64_t seed = 0;
};

// Permutes tiles among tiles of identical shape: full 8x8 tiles together,
// and the partial tiles along the right and bottom edges among themselves.
Raster patch_shuffle(const Raster& stimulus, Rng& rng, int tile = kMaskTileSize);

// Keeps each channel's Fourier magnitudes and replaces the phases with those
// of white noise (DC untouched). Output is real-valued and unclamped.
Raster phase_scramble(const Raster& stimulus, Rng& rng);

MaskSet generate_masks(std::string image_id, const Raster& stimulus,
                       MaskGenerator generator, uint64_t seed);

// Decodes first; throws Error(kInput) if the bytes are not an image.
MaskSet generate_masks(std::string image_id, std::span<const unsigned char> image_bytes,
                       MaskGenerator generator, uint64_t seed);

}  // namespace hype

#endif  // HYPE_MASKS_HPP_
