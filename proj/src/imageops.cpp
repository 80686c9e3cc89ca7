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

#include "imageops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <utility>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "error.hpp"

namespace ceiq {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be positive, got " +
                          std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

}  // namespace

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
  check_dims(width, height);
  if (data_.size() != 3 * pixel_count()) {
    throw InvalidArgument("RGB buffer size does not match dimensions");
  }
}

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(3 * pixel_count(), 0);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), data_(std::move(pixels)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("gray buffer size does not match dimensions");
  }
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

long round_half_away(double v) { return std::lround(v); }

GrayImage to_gray(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double y = 0.2989 * src[3 * i] + 0.5870 * src[3 * i + 1] +
                     0.1140 * src[3 * i + 2];
    dst[i] = static_cast<std::uint8_t>(
        std::clamp<long>(round_half_away(y), 0, 255));
  }
  return out;
}

RgbImage gray_as_rgb(const GrayImage& img) {
  RgbImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  }
  return out;
}

Histogram histogram_from_counts(std::vector<std::uint64_t> counts) {
  if (counts.empty()) {
    throw InvalidArgument("histogram needs at least one bin");
  }
  Histogram h;
  h.bins = static_cast<int>(counts.size());
  h.counts = std::move(counts);
  const std::uint64_t total = h.total();
  h.probabilities.assign(h.counts.size(), 0.0);
  if (total > 0) {
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      h.probabilities[i] =
          static_cast<double>(h.counts[i]) / static_cast<double>(total);
    }
  }
  return h;
}

Histogram compute_histogram(const GrayImage& img, int bins) {
  if (bins < 1 || bins > 256) {
    throw InvalidArgument("histogram bins must be in [1, 256], got " +
                          std::to_string(bins));
  }
  std::vector<std::uint64_t> counts(bins, 0);
  for (std::uint8_t v : img.data()) {
    ++counts[static_cast<unsigned>(v) * bins / 256];
  }
  return histogram_from_counts(std::move(counts));
}

std::vector<std::uint8_t> equalization_lut(const GrayImage& img) {
  std::array<std::uint64_t, 256> counts{};
  for (std::uint8_t v : img.data()) ++counts[v];
  const std::uint64_t n = img.pixel_count();

  // round(255 * cum / n) in exact integer arithmetic; ties round up, which is
  // away from zero for these nonnegative values.
  std::vector<std::uint8_t> lut(256);
  std::uint64_t cum = 0;
  for (int k = 0; k < 256; ++k) {
    cum += counts[k];
    lut[k] = static_cast<std::uint8_t>((2 * 255 * cum + n) / (2 * n));
  }
  return lut;
}

GrayImage equalize(const GrayImage& img) {
  const auto lut = equalization_lut(img);
  GrayImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[src[i]];
  return out;
}

DecodedImage load_image(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw IoError("cannot open image '" + path + "'");
  }
  cv::Mat m;
  try {
    m = cv::imread(path, cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw IoError("cannot decode image '" + path + "': " + e.what());
  }
  if (m.empty()) {
    throw IoError("cannot decode image '" + path + "'");
  }
  if (m.depth() != CV_8U) {
    throw InvalidArgument("image '" + path +
                          "' is not 8-bit; only 8-bit samples are supported");
  }
  const int w = m.cols;
  const int h = m.rows;
  const int ch = m.channels();
  if (ch == 1) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
      const auto* row = m.ptr<std::uint8_t>(y);
      std::copy(row, row + w, px.begin() + static_cast<std::ptrdiff_t>(y) * w);
    }
    return GrayImage(w, h, std::move(px));
  }
  if (ch != 3 && ch != 4) {
    throw InvalidArgument("image '" + path + "' has unsupported channel count " +
                          std::to_string(ch));
  }
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < w; ++x) {
      // OpenCV stores BGR(A).
      std::uint8_t* px = out.at(x, y);
      px[0] = row[ch * x + 2];
      px[1] = row[ch * x + 1];
      px[2] = row[ch * x + 0];
    }
  }
  return out;
}

GrayImage gray_of(const DecodedImage& img) {
  if (const auto* g = std::get_if<GrayImage>(&img)) return *g;
  return to_gray(std::get<RgbImage>(img));
}

namespace {

void write_mat(const std::string& path, const cv::Mat& m) {
  bool ok = false;
  try {
    ok = cv::imwrite(path, m);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write image '" + path + "': " + e.what());
  }
  if (!ok) throw IoError("cannot write image '" + path + "'");
}

}  // namespace

void save_png(const std::string& path, const RgbImage& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t* px = img.at(x, y);
      row[3 * x + 0] = px[2];
      row[3 * x + 1] = px[1];
      row[3 * x + 2] = px[0];
    }
  }
  write_mat(path, m);
}

void save_png(const std::string& path, const GrayImage& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) row[x] = img.at(x, y);
  }
  write_mat(path, m);
}

}  // namespace ceiq
