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

#include "features.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "error.hpp"

namespace ceiq {

bool FeatureVector::finite() const {
  for (double v : as_array()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

int feature_index(std::string_view name) {
  for (int i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  return -1;
}

double entropy(const Histogram& h) {
  if (h.total() == 0) {
    throw InvalidArgument("entropy of an empty histogram is undefined");
  }
  double e = 0.0;
  for (double p : h.probabilities) {
    if (p > 0.0) e -= p * std::log2(p);
  }
  return e;
}

double cross_entropy(const Histogram& p, const Histogram& q) {
  if (p.bins != q.bins) {
    throw InvalidArgument("cross entropy of histograms with " +
                          std::to_string(p.bins) + " and " +
                          std::to_string(q.bins) + " bins");
  }
  double e = 0.0;
  bool overlap = false;
  for (int i = 0; i < p.bins; ++i) {
    const double pi = p.probabilities[i];
    const double qi = q.probabilities[i];
    if (pi > 0.0 && qi > 0.0) {
      e -= pi * std::log2(qi);
      overlap = true;
    }
  }
  if (!overlap) {
    throw DegenerateInput("histograms share no nonzero bin");
  }
  return e;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

FeatureVector features_from_gray(const GrayImage& gray,
                                 const FeatureOptions& opts,
                                 StageTimings* timings) {
  auto t = Clock::now();
  const GrayImage enhanced = equalize(gray);
  if (timings) timings->equalize = seconds_since(t);

  t = Clock::now();
  FeatureVector fv;
  fv.s_ge = opts.similarity ? opts.similarity(gray, enhanced)
                            : ssim(gray, enhanced, opts.ssim).mean_ssim;
  if (timings) timings->similarity = seconds_since(t);

  t = Clock::now();
  const Histogram hg = compute_histogram(gray, opts.bins);
  const Histogram he = compute_histogram(enhanced, opts.bins);
  fv.e_g = entropy(hg);
  fv.e_e = entropy(he);
  try {
    fv.e_ge = cross_entropy(hg, he);
    fv.e_eg = cross_entropy(he, hg);
  } catch (const DegenerateInput&) {
    throw DegenerateInput(
        "gray and equalized histograms share no nonzero bin; the image "
        "carries no usable contrast signal");
  }
  if (timings) timings->entropy = seconds_since(t);
  return fv;
}

}  // namespace

FeatureVector extract_features(const GrayImage& gray,
                               const FeatureOptions& opts) {
  return features_from_gray(gray, opts, nullptr);
}

FeatureVector extract_features(const RgbImage& img,
                               const FeatureOptions& opts) {
  return features_from_gray(to_gray(img), opts, nullptr);
}

FeatureVector extract_features(const DecodedImage& img,
                               const FeatureOptions& opts) {
  return features_from_gray(gray_of(img), opts, nullptr);
}

FeatureVector extract_features_timed(const DecodedImage& img,
                                     const FeatureOptions& opts,
                                     StageTimings& timings) {
  timings = {};
  const auto start = Clock::now();
  GrayImage gray(1, 1);
  if (const auto* rgb = std::get_if<RgbImage>(&img)) {
    const auto t = Clock::now();
    gray = to_gray(*rgb);
    timings.decolorize = seconds_since(t);
  } else {
    gray = std::get<GrayImage>(img);
  }
  FeatureVector fv = features_from_gray(gray, opts, &timings);
  timings.total = seconds_since(start);
  return fv;
}

}  // namespace ceiq
