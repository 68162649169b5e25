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

#include "hype/pool.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <openssl/evp.h>

#include "hype/error.hpp"
#include "hype/random.hpp"

namespace hype {

const ImageRecord* ImagePool::find(std::string_view image_id) const {
  for (const auto* half : {&real_images, &fake_images}) {
    for (const ImageRecord& r : *half) {
      if (r.image_id == image_id) return &r;
    }
  }
  return nullptr;
}

std::map<std::string, int> ImagePool::class_composition() const {
  std::map<std::string, int> counts;
  for (const auto* half : {&real_images, &fake_images}) {
    for (const ImageRecord& r : *half) {
      if (r.class_label) ++counts[*r.class_label];
    }
  }
  return counts;
}

void ImagePool::validate() const {
  std::set<std::string_view> seen;
  for (const ImageRecord& r : real_images) {
    if (r.source != Label::kReal) fail(ErrorKind::kInput, "fake image in real half: " + r.image_id);
    if (!seen.insert(r.image_id).second) fail(ErrorKind::kInput, "duplicate image id " + r.image_id);
  }
  for (const ImageRecord& r : fake_images) {
    if (r.source != Label::kFake) fail(ErrorKind::kInput, "real image in fake half: " + r.image_id);
    if (!r.model_id) fail(ErrorKind::kInput, "fake image without model_id: " + r.image_id);
    if (!seen.insert(r.image_id).second) fail(ErrorKind::kInput, "duplicate image id " + r.image_id);
  }
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    uint64_t seed) {
  if (k > n) fail(ErrorKind::kCapacity, "cannot draw " + std::to_string(k) +
                                            " items from " + std::to_string(n));
  // Partial Fisher-Yates over a sparse index map, O(k) memory.
  Rng rng(seed);
  std::unordered_map<std::size_t, std::size_t> swapped;
  auto at = [&](std::size_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    const std::size_t vi = at(i);
    const std::size_t vj = at(j);
    out.push_back(vj);
    swapped[j] = vi;
    swapped[i] = vj;
  }
  return out;
}

ImagePool build_pool(std::span<const ImageRecord> real_source,
                     std::span<const ImageRecord> fake_source, std::size_t k,
                     uint64_t seed, std::string pool_id) {
  if (real_source.size() < k) {
    fail(ErrorKind::kCapacity, "real source holds " + std::to_string(real_source.size()) +
                                   " images, pool needs " + std::to_string(k));
  }
  if (fake_source.size() < k) {
    fail(ErrorKind::kCapacity, "fake source holds " + std::to_string(fake_source.size()) +
                                   " images, pool needs " + std::to_string(k));
  }
  ImagePool pool;
  pool.pool_id = std::move(pool_id);
  pool.sampling_seed = seed;
  for (std::size_t i : sample_without_replacement(real_source.size(), k, derive_seed(seed, 0))) {
    pool.real_images.push_back(real_source[i]);
  }
  for (std::size_t i : sample_without_replacement(fake_source.size(), k, derive_seed(seed, 1))) {
    pool.fake_images.push_back(fake_source[i]);
  }
  pool.validate();
  return pool;
}

std::string sha256_hex(std::span<const unsigned char> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::kInput, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string content_checksum(std::span<const unsigned char> bytes) {
  return "sha256:" + sha256_hex(bytes);
}

bool verify_checksum(const ImageRecord& record, std::span<const unsigned char> bytes) {
  return record.checksum.empty() || record.checksum == content_checksum(bytes);
}

nlohmann::json to_json(const ImageRecord& r) {
  nlohmann::json j;
  j["id"] = r.image_id;
  j["source"] = to_string(r.source);
  j["model_id"] = r.model_id ? nlohmann::json(*r.model_id) : nlohmann::json(nullptr);
  j["class_label"] = r.class_label ? nlohmann::json(*r.class_label) : nlohmann::json(nullptr);
  j["uri"] = r.uri;
  j["checksum"] = r.checksum;
  return j;
}

ImageRecord image_record_from_json(const nlohmann::json& j) {
  ImageRecord r;
  try {
    r.image_id = j.at("id").get<std::string>();
    r.source = parse_label(j.at("source").get<std::string>());
    if (j.contains("model_id") && !j["model_id"].is_null()) {
      r.model_id = j["model_id"].get<std::string>();
    }
    if (j.contains("class_label") && !j["class_label"].is_null()) {
      r.class_label = j["class_label"].get<std::string>();
    }
    r.uri = j.value("uri", "");
    r.checksum = j.value("checksum", "");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInput, std::string("malformed image record: ") + e.what());
  }
  if (r.image_id.empty()) fail(ErrorKind::kInput, "image record without id");
  return r;
}

std::vector<ImageRecord> read_image_records(std::istream& in) {
  std::vector<ImageRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      fail(ErrorKind::kInput, "manifest line " + std::to_string(line_no) + " is not JSON");
    }
    records.push_back(image_record_from_json(j));
  }
  return records;
}

void write_pool_manifest(std::ostream& out, const ImagePool& pool) {
  for (const auto* half : {&pool.real_images, &pool.fake_images}) {
    for (const ImageRecord& r : *half) out << to_json(r).dump() << '\n';
  }
}

ImagePool read_pool_manifest(std::istream& in, std::string pool_id) {
  ImagePool pool;
  pool.pool_id = std::move(pool_id);
  for (ImageRecord& r : read_image_records(in)) {
    (r.source == Label::kReal ? pool.real_images : pool.fake_images).push_back(std::move(r));
  }
  pool.validate();
  return pool;
}

void save_pool(const std::filesystem::path& path, const ImagePool& pool) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::kInput, "cannot write " + path.string());
  write_pool_manifest(out, pool);
}

ImagePool load_pool(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kNotFound, "cannot read pool manifest " + path.string());
  return read_pool_manifest(in, path.stem().string());
}

std::vector<ImageRecord> scan_image_directory(const std::filesystem::path& root, Label source,
                                              std::optional<std::string> model_id,
                                              const std::string& id_prefix) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) fail(ErrorKind::kNotFound, root.string() + " is not a directory");
  static const std::set<std::string> kExtensions = {".png", ".pgm", ".ppm", ".jpg", ".jpeg"};
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (kExtensions.count(ext)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ImageRecord> out;
  for (const fs::path& file : files) {
    const fs::path rel = fs::relative(file, root);
    std::ifstream in(file, std::ios::binary);
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                           std::istreambuf_iterator<char>());
    ImageRecord r;
    r.image_id = id_prefix + "/" + rel.generic_string();
    r.source = source;
    if (source == Label::kFake) r.model_id = model_id;
    if (rel.has_parent_path()) r.class_label = rel.parent_path().filename().string();
    r.uri = "file://" + fs::absolute(file).lexically_normal().string();
    r.checksum = content_checksum(bytes);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hype
