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

#include "synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "error.hpp"
#include "rng.hpp"

namespace ceiq {

namespace fs = std::filesystem;

std::string distortion_label(const Distortion& d) {
  char buf[48];
  switch (d.kind) {
    case DistortionKind::kContrast:
      std::snprintf(buf, sizeof buf, "contrast%.2f", d.amount);
      break;
    case DistortionKind::kGamma:
      std::snprintf(buf, sizeof buf, "gamma%.2f", d.amount);
      break;
    case DistortionKind::kShift:
      std::snprintf(buf, sizeof buf, "shift%+.0f", d.amount);
      break;
  }
  return buf;
}

namespace {

template <typename F>
RgbImage map_channels(const RgbImage& img, F f) {
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    lut[v] = static_cast<std::uint8_t>(
        std::clamp<long>(round_half_away(f(static_cast<double>(v))), 0, 255));
  }
  RgbImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[src[i]];
  return out;
}

// Uniform double in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Bilinearly interpolated lattice noise with smoothstep weights.
std::vector<double> value_noise(int w, int h, int cells, std::mt19937_64& gen) {
  const int gw = cells + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gw) * gw);
  for (double& v : lattice) v = unit(gen);
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const double fy = static_cast<double>(y) * cells / h;
    const int iy = static_cast<int>(fy);
    double ty = fy - iy;
    ty = ty * ty * (3 - 2 * ty);
    for (int x = 0; x < w; ++x) {
      const double fx = static_cast<double>(x) * cells / w;
      const int ix = static_cast<int>(fx);
      double tx = fx - ix;
      tx = tx * tx * (3 - 2 * tx);
      auto at = [&](int a, int b) { return lattice[static_cast<std::size_t>(b) * gw + a]; };
      const double top = at(ix, iy) * (1 - tx) + at(ix + 1, iy) * tx;
      const double bot = at(ix, iy + 1) * (1 - tx) + at(ix + 1, iy + 1) * tx;
      out[static_cast<std::size_t>(y) * w + x] = top * (1 - ty) + bot * ty;
    }
  }
  return out;
}

}  // namespace

RgbImage scale_contrast(const RgbImage& img, double factor) {
  return map_channels(img, [factor](double v) { return 128.0 + factor * (v - 128.0); });
}

RgbImage apply_gamma(const RgbImage& img, double gamma) {
  return map_channels(img, [gamma](double v) { return 255.0 * std::pow(v / 255.0, gamma); });
}

RgbImage shift_mean(const RgbImage& img, double shift) {
  return map_channels(img, [shift](double v) { return v + shift; });
}

RgbImage apply_distortion(const RgbImage& img, const Distortion& d) {
  switch (d.kind) {
    case DistortionKind::kContrast: return scale_contrast(img, d.amount);
    case DistortionKind::kGamma: return apply_gamma(img, d.amount);
    case DistortionKind::kShift: return shift_mean(img, d.amount);
  }
  return img;
}

RgbImage synth_reference(int width, int height, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const std::size_t n = static_cast<std::size_t>(width) * height;

  std::vector<double> lum(n, 0.0);
  double amp = 1.0;
  for (int cells = 3; cells <= 48; cells *= 2) {
    const auto layer = value_noise(width, height, cells, gen);
    for (std::size_t i = 0; i < n; ++i) lum[i] += amp * layer[i];
    amp *= 0.55;
  }

  // Hard-edged ellipses give the scene structure at several scales.
  const int shapes = 4 + static_cast<int>(uniform_below(gen, 5));
  for (int s = 0; s < shapes; ++s) {
    const double cx = unit(gen) * width;
    const double cy = unit(gen) * height;
    const double rx = (0.05 + 0.2 * unit(gen)) * width;
    const double ry = (0.05 + 0.2 * unit(gen)) * height;
    const double delta = (unit(gen) - 0.5) * 1.2;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = (x - cx) / rx;
        const double dy = (y - cy) / ry;
        if (dx * dx + dy * dy <= 1.0) lum[static_cast<std::size_t>(y) * width + x] += delta;
      }
    }
  }

  const auto [lo, hi] = std::minmax_element(lum.begin(), lum.end());
  const double span = std::max(*hi - *lo, 1e-9);
  // Scene-dependent tonal curve, range and tint.
  const double tone = 0.7 + 0.8 * unit(gen);
  const double black = 5.0 + 25.0 * unit(gen);
  const double white = 225.0 + 28.0 * unit(gen);
  const std::array<double, 3> tint = {0.85 + 0.3 * unit(gen), 0.85 + 0.3 * unit(gen),
                                      0.85 + 0.3 * unit(gen)};
  const auto chroma = value_noise(width, height, 5, gen);

  std::vector<double> rgb(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::pow((lum[i] - *lo) / span, tone);
    const double base = black + (white - black) * t;
    for (int c = 0; c < 3; ++c) {
      rgb[3 * i + c] =
          base * tint[c] + (c == 1 ? 0.0 : 30.0 * (chroma[i] - 0.5) * (c ? 1 : -1));
    }
  }

  // Normalize gray exposure and RMS contrast.
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = 0.2989 * rgb[3 * i] + 0.5870 * rgb[3 * i + 1] + 0.1140 * rgb[3 * i + 2];
    s1 += g;
    s2 += g * g;
  }
  const double mean = s1 / n;
  const double sd = std::sqrt(std::max(s2 / n - mean * mean, 1e-12));
  const double gain = kReferenceContrast / sd;

  RgbImage out(width, height);
  auto dst = out.data();
  for (std::size_t i = 0; i < 3 * n; ++i) {
    const double v = kReferenceMean + gain * (rgb[i] - mean);
    dst[i] = static_cast<std::uint8_t>(std::clamp<long>(round_half_away(v), 0, 255));
  }
  return out;
}

namespace {

std::pair<double, double> gray_mean_std(const RgbImage& img) {
  const GrayImage g = to_gray(img);
  double s = 0.0, s2 = 0.0;
  for (std::uint8_t v : g.data()) {
    s += v;
    s2 += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(g.pixel_count());
  const double m = s / n;
  return {m, std::sqrt(std::max(0.0, s2 / n - m * m))};
}

}  // namespace

double proxy_opinion_score(const RgbImage& reference, const RgbImage& distorted) {
  const auto [mr, sr] = gray_mean_std(reference);
  const auto [md, sd] = gray_mean_std(distorted);
  if (sr <= 0.0) throw DegenerateInput("reference image has no contrast");
  const double r = sd / sr;
  const double contrast_q = r <= 0.0 ? 0.0 : std::min(r, 1.0 / r);
  return 100.0 * contrast_q * std::exp(-std::fabs(md - mr) / 100.0);
}

DatasetManifest write_synthetic_corpus(const std::string& dir,
                                       const SynthOptions& opts) {
  if (opts.distortions.empty()) {
    throw InvalidArgument("synthetic corpus needs at least one distortion");
  }
  const bool from_files = !opts.reference_paths.empty();
  const int refs = from_files ? static_cast<int>(opts.reference_paths.size())
                              : opts.references;
  if (refs < 1) throw InvalidArgument("synthetic corpus needs at least one reference");

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  const fs::path root = fs::absolute(dir);

  DatasetManifest m;
  m.name = "synthetic";
  m.polarity = Polarity::kMos;
  for (int r = 0; r < refs; ++r) {
    RgbImage ref(1, 1);
    if (from_files) {
      const DecodedImage d = load_image(opts.reference_paths[r]);
      ref = std::holds_alternative<RgbImage>(d) ? std::get<RgbImage>(d)
                                                : gray_as_rgb(std::get<GrayImage>(d));
    } else {
      ref = synth_reference(opts.width, opts.height,
                            opts.seed * 1000003ULL + static_cast<std::uint64_t>(r));
    }
    char ref_id[16];
    std::snprintf(ref_id, sizeof ref_id, "ref%03d", r);
    for (const auto& d : opts.distortions) {
      const RgbImage img = apply_distortion(ref, d);
      const fs::path file = root / (std::string(ref_id) + "_" + distortion_label(d) + ".png");
      save_png(file.string(), img);
      m.entries.push_back({file.string(), proxy_opinion_score(ref, img), ref_id});
    }
  }

  const fs::path manifest_path = root / "manifest.csv";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + manifest_path.string() + "'");
  // Paths in the file are relative to the manifest.
  DatasetManifest portable = m;
  for (auto& e : portable.entries) e.image_path = fs::path(e.image_path).filename().string();
  out << format_manifest(portable);
  if (!out) throw IoError("failed writing '" + manifest_path.string() + "'");
  return m;
}

}  // namespace ceiq
