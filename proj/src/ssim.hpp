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

// Structural similarity index with a normalized Gaussian window, computed
// over the "valid" region only (no border padding).

#ifndef CEIQ_SSIM_HPP_
#define CEIQ_SSIM_HPP_

#include <functional>
#include <vector>

#include "imageops.hpp"

namespace ceiq {

struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
  int window_size = 11;
  double window_sigma = 1.5;
  // Exponents of the luminance, contrast and structure terms.
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  // Box-filter and subsample by max(1, round(min(H, W) / 256)) first.
  bool auto_downsample = true;

  // Throws InvalidArgument when any field is out of range.
  void validate() const;
};

struct SsimResult {
  double mean_ssim = 0.0;
  // Row-major local index over the valid region; empty unless requested.
  int map_width = 0;
  int map_height = 0;
  std::vector<double> ssim_map;
};

// Dense real-valued plane used by the filtering stages.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

Plane to_plane(const GrayImage& img);

// Downsampling factor applied when auto_downsample is on.
int ssim_downsample_factor(int width, int height);

// f x f mean filter with symmetric (edge-including) reflection, anchored at
// floor((f + 1) / 2) - 1, followed by keeping every f-th row and column.
Plane box_downsample(const Plane& src, int factor);

// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_window(int size, double sigma);

// Throws InvalidArgument on dimension mismatch or when an image (after any
// downsampling) is smaller than the window.
SsimResult ssim(const GrayImage& a, const GrayImage& b,
                const SsimParams& params = {}, bool keep_map = false);

// Pluggable full-reference similarity between the gray image and its
// enhanced version.
using SimilarityFn =
    std::function<double(const GrayImage& gray, const GrayImage& enhanced)>;

SimilarityFn ssim_similarity(const SsimParams& params = {});

}  // namespace ceiq

#endif  // CEIQ_SSIM_HPP_
