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

#ifndef HYPE_POOL_HPP_
#define HYPE_POOL_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hype/judgment.hpp"
#include "json.hpp"

namespace hype {

inline constexpr std::size_t kDefaultPoolSize = 5000;

struct ImageRecord {
  std::string image_id;
  Label source = Label::kReal;
  std::optional<std::string> model_id;     // fakes only
  std::optional<std::string> class_label;  // conditional pools
  std::string uri;
  std::string checksum;  // "sha256:<hex>" of the image bytes, may be empty

  bool operator==(const ImageRecord&) const = default;
};

struct ImagePool {
  std::string pool_id;
  std::vector<ImageRecord> real_images;
  std::vector<ImageRecord> fake_images;
  uint64_t sampling_seed = 0;

  std::size_t size() const { return real_images.size() + fake_images.size(); }
  const ImageRecord* find(std::string_view image_id) const;
  // Images per class label, over both halves.
  std::map<std::string, int> class_composition() const;
  // Throws Error(kInput) on duplicate ids or mis-sourced records.
  void validate() const;
};

// Uniform sample of k records from each source without replacement.
// Throws Error(kCapacity) when a source holds fewer than k records.
ImagePool build_pool(std::span<const ImageRecord> real_source,
                     std::span<const ImageRecord> fake_source, std::size_t k,
                     uint64_t seed, std::string pool_id);

// `k` indices drawn uniformly without replacement from [0, n), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    uint64_t seed);

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string content_checksum(std::span<const unsigned char> bytes);
// True when the record carries no checksum or the bytes match it.
bool verify_checksum(const ImageRecord& record, std::span<const unsigned char> bytes);

// Pool manifests: one JSON object per line with keys
// id, source, model_id, class_label, uri, checksum.
nlohmann::json to_json(const ImageRecord& record);
ImageRecord image_record_from_json(const nlohmann::json& j);
void write_pool_manifest(std::ostream& out, const ImagePool& pool);
ImagePool read_pool_manifest(std::istream& in, std::string pool_id);
std::vector<ImageRecord> read_image_records(std::istream& in);
void save_pool(const std::filesystem::path& path, const ImagePool& pool);
ImagePool load_pool(const std::filesystem::path& path);

// Image files (.png, .pgm, .ppm, .jpg, .jpeg) under `root`, in path order.
// Ids are "<prefix>/<relative path>", uris are absolute file:// paths,
// checksums are computed, and a file inside a subdirectory takes the
// subdirectory's name as its class label.
std::vector<ImageRecord> scan_image_directory(const std::filesystem::path& root, Label source,
                                              std::optional<std::string> model_id,
                                              const std::string& id_prefix);

}  // namespace hype

#endif  // HYPE_POOL_HPP_
