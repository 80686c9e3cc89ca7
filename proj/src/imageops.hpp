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

// 8-bit image containers, decolorization, histograms and global histogram
// equalization. Everything here is a pure function of its inputs.

#ifndef CEIQ_IMAGEOPS_HPP_
#define CEIQ_IMAGEOPS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ceiq {

// Interleaved 8-bit RGB, row-major.
class RgbImage {
 public:
  RgbImage(int width, int height, std::vector<std::uint8_t> rgb);
  RgbImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  const std::uint8_t* at(int x, int y) const {
    return &data_[3 * (static_cast<std::size_t>(y) * width_ + x)];
  }
  std::uint8_t* at(int x, int y) {
    return &data_[3 * (static_cast<std::size_t>(y) * width_ + x)];
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

// Single-channel 8-bit image, row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);
  GrayImage(int width, int height, std::uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return data_.size(); }
  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  std::uint8_t at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t& at(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

struct Histogram {
  int bins = 0;
  std::vector<std::uint64_t> counts;
  std::vector<double> probabilities;

  std::uint64_t total() const;
};

// Nearest integer, ties away from zero. The single rounding rule used by
// every integer-producing operation in the library.
long round_half_away(double v);

// Y channel of YIQ: 0.2989 R + 0.5870 G + 0.1140 B, rounded and clamped.
GrayImage to_gray(const RgbImage& img);

// Replicates a gray image into three identical channels.
RgbImage gray_as_rgb(const GrayImage& img);

// Value v falls into bin floor(v * bins / 256). Throws InvalidArgument for
// bins outside [1, 256].
Histogram compute_histogram(const GrayImage& img, int bins);

// Histogram built from raw counts; probabilities are counts / sum(counts).
Histogram histogram_from_counts(std::vector<std::uint64_t> counts);

// 256-entry lookup table T(k) = round(255 * cdf(k)).
std::vector<std::uint8_t> equalization_lut(const GrayImage& img);

// Classical global histogram equalization through equalization_lut.
GrayImage equalize(const GrayImage& img);

// Decoded image file: a single-channel file stays gray and skips
// decolorization.
using DecodedImage = std::variant<RgbImage, GrayImage>;

// Decodes PNG, JPEG or BMP. Only 8-bit samples are accepted; an alpha
// channel is dropped. Throws IoError when the file cannot be read or
// decoded and InvalidArgument for unsupported sample depths.
DecodedImage load_image(const std::string& path);

// Gray working image for a decoded file.
GrayImage gray_of(const DecodedImage& img);

// Writes a PNG. Used by the synthetic corpus generator.
void save_png(const std::string& path, const RgbImage& img);
void save_png(const std::string& path, const GrayImage& img);

}  // namespace ceiq

#endif  // CEIQ_IMAGEOPS_HPP_
