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

// Synthetic contrast-distortion corpus with procedural reference scenes and
// a deterministic proxy opinion score.

#ifndef CEIQ_SYNTH_HPP_
#define CEIQ_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "imageops.hpp"

namespace ceiq {

enum class DistortionKind { kContrast, kGamma, kShift };

struct Distortion {
  DistortionKind kind = DistortionKind::kContrast;
  double amount = 1.0;  // contrast factor, gamma exponent or gray-level shift
};

std::string distortion_label(const Distortion& d);

// 128 + factor * (v - 128) per channel, rounded and clamped.
RgbImage scale_contrast(const RgbImage& img, double factor);
// 255 * (v / 255)^gamma per channel.
RgbImage apply_gamma(const RgbImage& img, double gamma);
// v + shift per channel, clamped.
RgbImage shift_mean(const RgbImage& img, double shift);
RgbImage apply_distortion(const RgbImage& img, const Distortion& d);

// Gray mean and standard deviation every procedural reference is scaled to.
inline constexpr double kReferenceMean = 128.0;
inline constexpr double kReferenceContrast = 55.0;

// Smooth multi-octave value noise with a few hard-edged shapes and a color
// tint, 8-bit RGB, normalized to kReferenceMean / kReferenceContrast.
RgbImage synth_reference(int width, int height, std::uint64_t seed);

// 100 * min(r, 1/r) * exp(-|mean_d - mean_r| / 100), where r is the ratio of
// RMS contrasts (gray standard deviations) of distorted and reference.
double proxy_opinion_score(const RgbImage& reference, const RgbImage& distorted);

struct SynthOptions {
  int references = 20;
  int width = 256;
  int height = 256;
  std::uint64_t seed = 1;
  std::vector<Distortion> distortions = {
      {DistortionKind::kContrast, 0.2}, {DistortionKind::kContrast, 0.4},
      {DistortionKind::kContrast, 0.6}, {DistortionKind::kContrast, 0.8},
      {DistortionKind::kContrast, 1.0}, {DistortionKind::kGamma, 0.5},
      {DistortionKind::kGamma, 0.75},   {DistortionKind::kGamma, 1.6},
      {DistortionKind::kShift, -40.0},  {DistortionKind::kShift, 40.0},
  };
  // Reference scenes loaded from files instead of generated; when
  // non-empty, `references` is ignored.
  std::vector<std::string> reference_paths;
};

// Writes PNGs plus manifest.csv into dir (created if missing) and returns
// the manifest with absolute image paths.
DatasetManifest write_synthetic_corpus(const std::string& dir,
                                       const SynthOptions& opts);

}  // namespace ceiq

#endif  // CEIQ_SYNTH_HPP_
