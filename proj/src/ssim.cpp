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

#include "ssim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace ceiq {

void SsimParams::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0)) {
    throw InvalidArgument("SSIM constants k1 and k2 must be positive");
  }
  if (!(dynamic_range > 0.0)) {
    throw InvalidArgument("SSIM dynamic range must be positive");
  }
  if (window_size < 3 || window_size % 2 == 0) {
    throw InvalidArgument("SSIM window size must be odd and >= 3, got " +
                          std::to_string(window_size));
  }
  if (!(window_sigma > 0.0)) {
    throw InvalidArgument("SSIM window sigma must be positive");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw InvalidArgument("SSIM exponents must be finite");
  }
}

Plane to_plane(const GrayImage& img) {
  Plane p{img.width(), img.height(), {}};
  p.values.assign(img.data().begin(), img.data().end());
  return p;
}

int ssim_downsample_factor(int width, int height) {
  const long f = round_half_away(std::min(width, height) / 256.0);
  return static_cast<int>(std::max(1L, f));
}

namespace {

// Symmetric reflection that repeats the edge sample: -1 -> 0, n -> n - 1.
int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

}  // namespace

Plane box_downsample(const Plane& src, int factor) {
  if (factor <= 1) return src;
  const int anchor = (factor + 1) / 2 - 1;
  const double norm = 1.0 / (static_cast<double>(factor) * factor);
  Plane out;
  out.width = (src.width + factor - 1) / factor;
  out.height = (src.height + factor - 1) / factor;
  out.values.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int oy = 0; oy < out.height; ++oy) {
    for (int ox = 0; ox < out.width; ++ox) {
      const int y0 = oy * factor - anchor;
      const int x0 = ox * factor - anchor;
      double sum = 0.0;
      for (int dy = 0; dy < factor; ++dy) {
        const int y = reflect(y0 + dy, src.height);
        for (int dx = 0; dx < factor; ++dx) {
          sum += src.at(reflect(x0 + dx, src.width), y);
        }
      }
      out.values[static_cast<std::size_t>(oy) * out.width + ox] = sum * norm;
    }
  }
  return out;
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> taps(size);
  const double r = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - r;
    taps[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

namespace {

// Separable "valid" correlation of src with taps x taps.
Plane filter_valid(const Plane& src, const std::vector<double>& taps) {
  const int n = static_cast<int>(taps.size());
  const int ow = src.width - n + 1;
  const int oh = src.height - n + 1;

  std::vector<double> rows(static_cast<std::size_t>(src.height) * ow);
  for (int y = 0; y < src.height; ++y) {
    const double* in = &src.values[static_cast<std::size_t>(y) * src.width];
    double* out = &rows[static_cast<std::size_t>(y) * ow];
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += taps[k] * in[x + k];
      out[x] = s;
    }
  }

  Plane out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    double* o = &out.values[static_cast<std::size_t>(y) * ow];
    for (int k = 0; k < n; ++k) {
      const double t = taps[k];
      const double* in = &rows[static_cast<std::size_t>(y + k) * ow];
      for (int x = 0; x < ow; ++x) o[x] += t * in[x];
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out{a.width, a.height, std::vector<double>(a.values.size())};
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    out.values[i] = a.values[i] * b.values[i];
  }
  return out;
}

// sign(v) * |v|^e, so fractional exponents stay real on negative
// structure terms.
double signed_pow(double v, double e) {
  return std::copysign(std::pow(std::fabs(v), e), v);
}

}  // namespace

SsimResult ssim(const GrayImage& a, const GrayImage& b,
                const SsimParams& params, bool keep_map) {
  params.validate();
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidArgument(
        "SSIM inputs differ in size: " + std::to_string(a.width()) + "x" +
        std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
        std::to_string(b.height()));
  }

  Plane pa = to_plane(a);
  Plane pb = to_plane(b);
  if (params.auto_downsample) {
    const int f = ssim_downsample_factor(a.width(), a.height());
    pa = box_downsample(pa, f);
    pb = box_downsample(pb, f);
  }
  if (pa.width < params.window_size || pa.height < params.window_size) {
    throw InvalidArgument("image of " + std::to_string(pa.width) + "x" +
                          std::to_string(pa.height) +
                          " is smaller than the SSIM window of " +
                          std::to_string(params.window_size));
  }

  const auto taps = gaussian_window(params.window_size, params.window_sigma);
  const Plane mu_a = filter_valid(pa, taps);
  const Plane mu_b = filter_valid(pb, taps);
  const Plane e_aa = filter_valid(product(pa, pa), taps);
  const Plane e_bb = filter_valid(product(pb, pb), taps);
  const Plane e_ab = filter_valid(product(pa, pb), taps);

  const double c1 = (params.k1 * params.dynamic_range) *
                    (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) *
                    (params.k2 * params.dynamic_range);
  const double c3 = c2 / 2.0;
  const bool unit_exponents =
      params.alpha == 1.0 && params.beta == 1.0 && params.gamma == 1.0;

  SsimResult result;
  result.map_width = mu_a.width;
  result.map_height = mu_a.height;
  std::vector<double> map(mu_a.values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double ma = mu_a.values[i];
    const double mb = mu_b.values[i];
    const double ma2 = ma * ma;
    const double mb2 = mb * mb;
    const double mab = ma * mb;
    const double va = e_aa.values[i] - ma2;
    const double vb = e_bb.values[i] - mb2;
    const double cov = e_ab.values[i] - mab;
    double v;
    if (unit_exponents) {
      v = ((2.0 * mab + c1) * (2.0 * cov + c2)) /
          ((ma2 + mb2 + c1) * (va + vb + c2));
    } else {
      const double sa = std::sqrt(std::max(va, 0.0));
      const double sb = std::sqrt(std::max(vb, 0.0));
      const double lum = (2.0 * mab + c1) / (ma2 + mb2 + c1);
      const double con = (2.0 * sa * sb + c2) / (va + vb + c2);
      const double str = (cov + c3) / (sa * sb + c3);
      v = std::pow(lum, params.alpha) * std::pow(con, params.beta) *
          signed_pow(str, params.gamma);
    }
    map[i] = v;
    sum += v;
  }
  result.mean_ssim = sum / static_cast<double>(map.size());
  if (keep_map) result.ssim_map = std::move(map);
  return result;
}

SimilarityFn ssim_similarity(const SsimParams& params) {
  params.validate();
  return [params](const GrayImage& gray, const GrayImage& enhanced) {
    return ssim(gray, enhanced, params).mean_ssim;
  };
}

}  // namespace ceiq
