// Copyright 2026 The CEIQ Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subjective-score manifests, the on-disk feature cache and batch feature
// extraction.

#ifndef CEIQ_DATASET_HPP_
#define CEIQ_DATASET_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "svr.hpp"

namespace ceiq {

struct ManifestEntry {
  std::string image_path;
  double score = 0.0;
  std::string ref_id;
};

// CSV with header `image_path,score,ref_id`. Comment lines start with '#';
// `# polarity=MOS|DMOS` and `# name=...` are recognized.
struct DatasetManifest {
  std::string name;
  std::vector<ManifestEntry> entries;
  Polarity polarity = Polarity::kMos;

  // Throws InvalidArgument when empty, a path repeats, a ref_id is blank or
  // a score is not finite.
  void validate() const;

  // Distinct ref_ids in order of first appearance.
  std::vector<std::string> reference_ids() const;
};

// Relative image paths are resolved against base_dir when it is non-empty.
DatasetManifest parse_manifest(std::string_view csv, const std::string& name,
                               const std::string& base_dir = {});
DatasetManifest load_manifest(const std::string& path);
std::string format_manifest(const DatasetManifest& m);

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

// A manifest with one feature vector per entry.
struct Dataset {
  DatasetManifest manifest;
  std::vector<FeatureVector> features;

  std::vector<double> scores() const;
  TrainingSet training_set(std::span<const int> indices) const;
  TrainingSet training_set() const;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t file_content_hash(const std::string& path);

// Text key of every option that changes extracted values.
std::string feature_options_key(const FeatureOptions& opts);

// Features keyed by (content hash, options key). Values are stored with 17
// significant digits so cached and fresh features are bit-identical.
class FeatureCache {
 public:
  FeatureCache() = default;
  explicit FeatureCache(std::string path);

  const std::string& path() const { return path_; }
  std::optional<FeatureVector> find(std::uint64_t hash,
                                    const std::string& options) const;
  void insert(std::uint64_t hash, const std::string& options,
              const FeatureVector& fv);
  std::size_t size() const;
  bool dirty() const { return dirty_; }

  // Missing file is an empty cache; a malformed one throws ParseError.
  void load();
  void save() const;

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::pair<std::uint64_t, std::string>, FeatureVector> entries_;
  bool dirty_ = false;
};

struct ExtractionFailure {
  std::size_t index = 0;
  std::string path;
  ErrorKind kind = ErrorKind::kIo;
  std::string message;
};

struct BatchResult {
  std::vector<std::optional<FeatureVector>> features;
  std::vector<ExtractionFailure> failures;  // ordered by index
  std::size_t cache_hits = 0;
};

// Extracts features for every path, in input order, on `threads` workers.
// Individual failures are collected, never thrown.
BatchResult extract_batch(std::span<const std::string> paths,
                          const FeatureOptions& opts, int threads,
                          FeatureCache* cache = nullptr);

// Features for a whole manifest. The first failing entry is rethrown with
// its path in the message.
Dataset build_dataset(DatasetManifest manifest, const FeatureOptions& opts,
                      int threads, FeatureCache* cache = nullptr,
                      std::size_t* cache_hits = nullptr);

}  // namespace ceiq

#endif  // CEIQ_DATASET_HPP_
