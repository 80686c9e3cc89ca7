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

// The five contrast features: similarity of the gray image to its
// histogram-equalized version, the two histogram entropies and the two
// cross entropies between them.

#ifndef CEIQ_FEATURES_HPP_
#define CEIQ_FEATURES_HPP_

#include <array>
#include <string_view>

#include "imageops.hpp"
#include "ssim.hpp"

namespace ceiq {

inline constexpr int kFeatureCount = 5;
inline constexpr int kDefaultBins = 128;

struct FeatureVector {
  double s_ge = 0.0;  // similarity(gray, equalized)
  double e_g = 0.0;   // entropy of the gray histogram, bits
  double e_e = 0.0;   // entropy of the equalized histogram, bits
  double e_ge = 0.0;  // cross entropy, gray under equalized
  double e_eg = 0.0;  // cross entropy, equalized under gray

  std::array<double, kFeatureCount> as_array() const {
    return {s_ge, e_g, e_e, e_ge, e_eg};
  }
  static FeatureVector from_array(const std::array<double, kFeatureCount>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }
  bool finite() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "s_ge", "e_g", "e_e", "e_ge", "e_eg"};

// Index into kFeatureNames, or -1.
int feature_index(std::string_view name);

struct FeatureOptions {
  int bins = kDefaultBins;
  SsimParams ssim;
  // Overrides the SSIM stage when set.
  SimilarityFn similarity;
};

// -sum p log2 p over nonzero bins. Throws InvalidArgument for an all-zero
// histogram.
double entropy(const Histogram& h);

// -sum p log2 q over bins where both p and q are nonzero, without
// renormalization. Throws InvalidArgument on a bin-count mismatch and
// DegenerateInput when the common support is empty.
double cross_entropy(const Histogram& p, const Histogram& q);

// Wall-clock seconds spent in each stage of one extraction.
struct StageTimings {
  double decolorize = 0.0;
  double equalize = 0.0;
  double similarity = 0.0;
  double entropy = 0.0;
  double total = 0.0;
};

FeatureVector extract_features(const RgbImage& img,
                               const FeatureOptions& opts = {});
FeatureVector extract_features(const GrayImage& gray,
                               const FeatureOptions& opts = {});
FeatureVector extract_features(const DecodedImage& img,
                               const FeatureOptions& opts = {});

// Same pipeline, recording per-stage times. Decolorization time is zero
// for gray inputs.
FeatureVector extract_features_timed(const DecodedImage& img,
                                     const FeatureOptions& opts,
                                     StageTimings& timings);

}  // namespace ceiq

#endif  // CEIQ_FEATURES_HPP_
