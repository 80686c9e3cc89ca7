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

#include "dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "parallel.hpp"

namespace ceiq {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

void DatasetManifest::validate() const {
  if (entries.empty()) {
    throw InvalidArgument("manifest '" + name + "' has no entries");
  }
  std::set<std::string> paths;
  for (const auto& e : entries) {
    if (!paths.insert(e.image_path).second) {
      throw InvalidArgument("manifest '" + name + "' lists '" + e.image_path +
                            "' twice");
    }
    if (e.ref_id.empty()) {
      throw InvalidArgument("manifest '" + name + "' entry '" + e.image_path +
                            "' has an empty ref_id");
    }
    if (!std::isfinite(e.score)) {
      throw InvalidArgument("manifest '" + name + "' entry '" + e.image_path +
                            "' has a non-finite score");
    }
  }
}

std::vector<std::string> DatasetManifest::reference_ids() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (seen.insert(e.ref_id).second) ids.push_back(e.ref_id);
  }
  return ids;
}

DatasetManifest parse_manifest(std::string_view csv, const std::string& name,
                               const std::string& base_dir) {
  DatasetManifest m;
  m.name = name;
  bool header_seen = false;
  int lineno = 0;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    const std::string_view raw = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = trim(body.substr(0, eq));
      const std::string_view value = trim(body.substr(eq + 1));
      if (key == "polarity") {
        if (value == "MOS") {
          m.polarity = Polarity::kMos;
        } else if (value == "DMOS") {
          m.polarity = Polarity::kDmos;
        } else {
          throw ParseError("polarity must be MOS or DMOS, got '" +
                               std::string(value) + "'",
                           lineno);
        }
      } else if (key == "name") {
        m.name = std::string(value);
      }
      continue;
    }
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"image_path", "score", "ref_id"}) {
        throw ParseError("expected header 'image_path,score,ref_id'", lineno);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields, got " + std::to_string(fields.size()),
                       lineno);
    }
    ManifestEntry e;
    e.image_path = fields[0];
    if (e.image_path.empty()) throw ParseError("empty image_path", lineno);
    if (!base_dir.empty() && fs::path(e.image_path).is_relative()) {
      e.image_path = (fs::path(base_dir) / e.image_path).lexically_normal().string();
    }
    if (!parse_double(fields[1], e.score) || !std::isfinite(e.score)) {
      throw ParseError("invalid score '" + fields[1] + "'", lineno);
    }
    e.ref_id = fields[2];
    if (e.ref_id.empty()) throw ParseError("empty ref_id", lineno);
    m.entries.push_back(std::move(e));
  }
  if (!header_seen) throw ParseError("missing header 'image_path,score,ref_id'", 1);
  return m;
}

DatasetManifest load_manifest(const std::string& path) {
  const std::string text = read_file(path, "manifest");
  const fs::path p(path);
  try {
    return parse_manifest(text, p.stem().string(), p.parent_path().string());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

std::string format_manifest(const DatasetManifest& m) {
  std::string out = "# name=" + m.name + "\n# polarity=" +
                    std::string(polarity_name(m.polarity)) +
                    "\nimage_path,score,ref_id\n";
  for (const auto& e : m.entries) {
    out += csv_quote(e.image_path) + "," + format_double(e.score) + "," +
           csv_quote(e.ref_id) + "\n";
  }
  return out;
}

std::vector<double> Dataset::scores() const {
  std::vector<double> s;
  s.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) s.push_back(e.score);
  return s;
}

TrainingSet Dataset::training_set(std::span<const int> indices) const {
  TrainingSet t;
  t.source = manifest.name;
  t.polarity = manifest.polarity;
  t.samples.reserve(indices.size());
  for (int i : indices) {
    t.samples.push_back({features.at(i), manifest.entries.at(i).score});
  }
  return t;
}

TrainingSet Dataset::training_set() const {
  std::vector<int> all(manifest.entries.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return training_set(all);
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_content_hash(const std::string& path) {
  const std::string data = read_file(path, "image");
  return fnv1a64({reinterpret_cast<const std::uint8_t*>(data.data()), data.size()});
}

std::string feature_options_key(const FeatureOptions& opts) {
  const SsimParams& s = opts.ssim;
  std::string key = "bins=" + std::to_string(opts.bins);
  key += ";k1=" + format_double(s.k1) + ";k2=" + format_double(s.k2);
  key += ";L=" + format_double(s.dynamic_range);
  key += ";win=" + std::to_string(s.window_size) + ";sigma=" + format_double(s.window_sigma);
  key += ";exp=" + format_double(s.alpha) + "/" + format_double(s.beta) + "/" +
         format_double(s.gamma);
  key += ";ds=" + std::to_string(s.auto_downsample ? 1 : 0);
  if (opts.similarity) key += ";custom";
  return key;
}

// --- FeatureCache ---------------------------------------------------------

FeatureCache::FeatureCache(std::string path) : path_(std::move(path)) {}

std::optional<FeatureVector> FeatureCache::find(std::uint64_t hash,
                                                const std::string& options) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find({hash, options});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FeatureCache::insert(std::uint64_t hash, const std::string& options,
                          const FeatureVector& fv) {
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = entries_.insert_or_assign({hash, options}, fv);
  (void)it;
  dirty_ = true;
}

std::size_t FeatureCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

void FeatureCache::load() {
  if (path_.empty() || !fs::exists(path_)) return;
  const std::string text = read_file(path_, "feature cache");
  std::string_view rest = text;
  int lineno = 0;
  std::lock_guard<std::mutex> lock(mu_);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    const std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("content_hash")) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 2 + kFeatureCount) {
      throw ParseError(path_ + ": malformed feature cache row", lineno);
    }
    std::uint64_t hash = 0;
    const auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), hash, 16);
    if (ec != std::errc() || ptr != f[0].data() + f[0].size()) {
      throw ParseError(path_ + ": malformed content hash", lineno);
    }
    FeatureArray a{};
    for (int j = 0; j < kFeatureCount; ++j) {
      if (!parse_double(f[2 + j], a[j])) {
        throw ParseError(path_ + ": malformed feature value", lineno);
      }
    }
    entries_[{hash, f[1]}] = FeatureVector::from_array(a);
  }
}

void FeatureCache::save() const {
  if (path_.empty()) return;
  std::string out = "content_hash,options,s_ge,e_g,e_e,e_ge,e_eg\n";
  {
    std::lock_guard<std::mutex> lock(mu_);
    char hex[24];
    for (const auto& [key, fv] : entries_) {
      std::snprintf(hex, sizeof hex, "%016llx",
                    static_cast<unsigned long long>(key.first));
      out += hex;
      out += "," + csv_quote(key.second);
      for (double v : fv.as_array()) out += "," + format_double(v);
      out += "\n";
    }
  }
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoError("cannot write feature cache '" + tmp + "'");
    f << out;
    if (!f) throw IoError("failed writing feature cache '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path_, ec);
  if (ec) throw IoError("cannot replace feature cache '" + path_ + "': " + ec.message());
}

// --- batch extraction -----------------------------------------------------

BatchResult extract_batch(std::span<const std::string> paths,
                          const FeatureOptions& opts, int threads,
                          FeatureCache* cache) {
  BatchResult result;
  result.features.resize(paths.size());
  std::vector<std::optional<ExtractionFailure>> failures(paths.size());
  std::vector<char> hits(paths.size(), 0);
  const std::string key = feature_options_key(opts);

  parallel_for(paths.size(), threads, [&](std::size_t i) {
    const std::string& path = paths[i];
    try {
      std::uint64_t hash = 0;
      if (cache) {
        hash = file_content_hash(path);
        if (auto fv = cache->find(hash, key)) {
          result.features[i] = *fv;
          hits[i] = 1;
          return;
        }
      }
      const FeatureVector fv = extract_features(load_image(path), opts);
      result.features[i] = fv;
      if (cache) cache->insert(hash, key, fv);
    } catch (const Error& e) {
      failures[i] = ExtractionFailure{i, path, e.kind(), e.what()};
    } catch (const std::exception& e) {
      failures[i] = ExtractionFailure{i, path, ErrorKind::kIo, e.what()};
    }
  });

  for (auto& f : failures) {
    if (f) result.failures.push_back(std::move(*f));
  }
  for (char h : hits) result.cache_hits += h;
  return result;
}

Dataset build_dataset(DatasetManifest manifest, const FeatureOptions& opts,
                      int threads, FeatureCache* cache,
                      std::size_t* cache_hits) {
  manifest.validate();
  std::vector<std::string> paths;
  paths.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) paths.push_back(e.image_path);
  BatchResult batch = extract_batch(paths, opts, threads, cache);
  if (cache_hits) *cache_hits = batch.cache_hits;
  if (!batch.failures.empty()) {
    const auto& f = batch.failures.front();
    const std::string msg = "'" + f.path + "': " + f.message;
    switch (f.kind) {
      case ErrorKind::kIo: throw IoError(msg);
      case ErrorKind::kParse: throw ParseError(msg, 0);
      case ErrorKind::kDegenerate: throw DegenerateInput(msg);
      case ErrorKind::kConvergence: throw ConvergenceFailure(msg, 0.0);
      case ErrorKind::kInvalidArgument: throw InvalidArgument(msg);
    }
  }
  Dataset ds;
  ds.manifest = std::move(manifest);
  ds.features.reserve(batch.features.size());
  for (auto& fv : batch.features) ds.features.push_back(*fv);
  return ds;
}

}  // namespace ceiq
