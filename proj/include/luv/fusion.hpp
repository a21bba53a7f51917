// Copyright 2026 The LUV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Multi-exposure fusion: per-pixel quality weights (contrast, saturation,
// well-exposedness) blended through Laplacian pyramids.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "luv/core.hpp"

namespace luv {

using PlaneD = Plane<double>;

/// Normalized planar RGB.
struct ColorPlanes {
  std::array<PlaneD, 3> channel;

  int width() const noexcept { return channel[0].width(); }
  int height() const noexcept { return channel[0].height(); }

  static ColorPlanes from_image(const ImageRGB& img) {
    ColorPlanes out;
    for (auto& c : out.channel) c = PlaneD(img.width(), img.height());
    const auto src = img.bytes();
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      for (int c = 0; c < 3; ++c) out.channel[c].data()[i] = src[3 * i + static_cast<std::size_t>(c)] / 255.0;
    }
    return out;
  }

  ImageRGB to_image() const {
    ImageRGB out(width(), height());
    auto dst = out.bytes();
    for (std::size_t i = 0; i < channel[0].size(); ++i) {
      for (int c = 0; c < 3; ++c) dst[3 * i + static_cast<std::size_t>(c)] = to_byte(channel[c].data()[i]);
    }
    return out;
  }
};

struct FusionParams {
  double exposedness_sigma = 0.2;
  double weight_floor = 1e-12;
};

inline double well_exposedness(double channel_value, double sigma = 0.2) {
  const double d = channel_value - 0.5;
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

/// contrast * saturation * well-exposedness, floored at params.weight_floor.
/// Contrast is |4-neighbour Laplacian| of the luma plane with replicated
/// borders; saturation is the population std-dev of (r, g, b).
inline PlaneD quality_weights(const ColorPlanes& img, const FusionParams& params = {}) {
  const int w = img.width();
  const int h = img.height();
  PlaneD gray(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gray(x, y) = 0.299 * img.channel[0](x, y) + 0.587 * img.channel[1](x, y) + 0.114 * img.channel[2](x, y);
    }
  }
  PlaneD out(w, h);
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(0, y - 1), yp = std::min(h - 1, y + 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(0, x - 1), xp = std::min(w - 1, x + 1);
      const double contrast =
          std::abs(gray(xm, y) + gray(xp, y) + gray(x, ym) + gray(x, yp) - 4.0 * gray(x, y));
      const double r = img.channel[0](x, y), g = img.channel[1](x, y), b = img.channel[2](x, y);
      const double mu = (r + g + b) / 3.0;
      const double sat = std::sqrt(((r - mu) * (r - mu) + (g - mu) * (g - mu) + (b - mu) * (b - mu)) / 3.0);
      const double wexp = well_exposedness(r, params.exposedness_sigma) *
                          well_exposedness(g, params.exposedness_sigma) *
                          well_exposedness(b, params.exposedness_sigma);
      out(x, y) = std::max(contrast * sat * wexp, params.weight_floor);
    }
  }
  return out;
}

inline PlaneD quality_weights(const ImageRGB& img, const FusionParams& params = {}) {
  return quality_weights(ColorPlanes::from_image(img), params);
}

/// Divides each weight map by the per-pixel sum across maps.
inline std::vector<PlaneD> normalize_weights(std::vector<PlaneD> weights) {
  if (weights.empty()) return weights;
  const std::size_t n = weights.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& w : weights) sum += w.data()[i];
    for (auto& w : weights) w.data()[i] /= sum;
  }
  return weights;
}

// ---------------------------------------------------------------------------
// Pyramids (5-tap binomial kernel, ceil-halving, replicated borders)

namespace detail {

inline constexpr std::array<double, 5> kBinomial = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

inline int clamp_index(int i, int n) noexcept { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

inline PlaneD blur(const PlaneD& in) {
  const int w = in.width(), h = in.height();
  PlaneD tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -2; k <= 2; ++k) s += kBinomial[static_cast<std::size_t>(k + 2)] * in(clamp_index(x + k, w), y);
      tmp(x, y) = s;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = -2; k <= 2; ++k) s += kBinomial[static_cast<std::size_t>(k + 2)] * tmp(x, clamp_index(y + k, h));
      out(x, y) = s;
    }
  }
  return out;
}

inline PlaneD downsample(const PlaneD& in) {
  const PlaneD b = blur(in);
  const int w = (in.width() + 1) / 2, h = (in.height() + 1) / 2;
  PlaneD out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out(x, y) = b(2 * x, 2 * y);
  }
  return out;
}

/// 1-D expand: fine sample x takes coarse samples i with binomial weight at
/// offset x - 2i. Taps outside the coarse grid are dropped and the remaining
/// weights renormalized, which also covers odd sizes.
inline void upsample_axis(const double* src, int n_src, double* dst, int n_dst, std::ptrdiff_t src_stride,
                          std::ptrdiff_t dst_stride) {
  for (int x = 0; x < n_dst; ++x) {
    double s = 0.0, wsum = 0.0;
    for (int i = x / 2 - 1; i <= x / 2 + 1; ++i) {
      const int off = x - 2 * i;
      if (off < -2 || off > 2 || i < 0 || i >= n_src) continue;
      const double wt = kBinomial[static_cast<std::size_t>(off + 2)];
      s += wt * src[i * src_stride];
      wsum += wt;
    }
    dst[x * dst_stride] = s / wsum;
  }
}

inline PlaneD upsample(const PlaneD& in, int w, int h) {
  PlaneD tmp(w, in.height()), out(w, h);
  for (int y = 0; y < in.height(); ++y) upsample_axis(in.row(y), in.width(), tmp.row(y), w, 1, 1);
  for (int x = 0; x < w; ++x) upsample_axis(tmp.row(0) + x, in.height(), out.row(0) + x, h, w, w);
  return out;
}

}  // namespace detail

inline int pyramid_levels(int width, int height) {
  const int m = std::min(width, height);
  const int l = static_cast<int>(std::floor(std::log2(static_cast<double>(m)))) - 2;
  return std::max(1, l);
}

inline std::vector<PlaneD> gaussian_pyramid(const PlaneD& base, int levels) {
  std::vector<PlaneD> pyr{base};
  for (int l = 1; l < levels; ++l) pyr.push_back(detail::downsample(pyr.back()));
  return pyr;
}

/// Band-pass levels plus the coarsest Gaussian level as the last entry.
inline std::vector<PlaneD> laplacian_pyramid(const PlaneD& base, int levels) {
  std::vector<PlaneD> g = gaussian_pyramid(base, levels);
  for (std::size_t l = 0; l + 1 < g.size(); ++l) {
    const PlaneD up = detail::upsample(g[l + 1], g[l].width(), g[l].height());
    auto d = g[l].data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= up.data()[i];
  }
  return g;
}

inline PlaneD collapse_pyramid(std::span<const PlaneD> lap) {
  PlaneD acc = lap.back();
  for (std::size_t l = lap.size() - 1; l-- > 0;) {
    PlaneD up = detail::upsample(acc, lap[l].width(), lap[l].height());
    auto d = up.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += lap[l].data()[i];
    acc = std::move(up);
  }
  return acc;
}

/// Fuses exposures in normalized float space, output clamped to [0, 1].
inline ColorPlanes fuse_exposures_planes(std::span<const ColorPlanes> imgs, const FusionParams& params = {}) {
  if (imgs.empty()) throw InvalidArgument("fuse_exposures needs at least one image");
  const int w = imgs.front().width(), h = imgs.front().height();
  for (const auto& im : imgs) {
    if (im.width() != w || im.height() != h) throw InvalidArgument("fuse_exposures: dimension mismatch");
  }
  const int levels = pyramid_levels(w, h);
  std::vector<PlaneD> weights;
  weights.reserve(imgs.size());
  for (const auto& im : imgs) weights.push_back(quality_weights(im, params));
  weights = normalize_weights(std::move(weights));

  ColorPlanes out;
  std::vector<std::vector<PlaneD>> wpyr;
  wpyr.reserve(imgs.size());
  for (const auto& wt : weights) wpyr.push_back(gaussian_pyramid(wt, levels));
  for (int c = 0; c < 3; ++c) {
    std::vector<PlaneD> blended;
    for (std::size_t k = 0; k < imgs.size(); ++k) {
      const std::vector<PlaneD> lap = laplacian_pyramid(imgs[k].channel[static_cast<std::size_t>(c)], levels);
      if (blended.empty()) {
        for (const auto& l : lap) blended.emplace_back(l.width(), l.height(), 0.0);
      }
      for (std::size_t l = 0; l < lap.size(); ++l) {
        auto dst = blended[l].data();
        const auto a = lap[l].data();
        const auto g = wpyr[k][l].data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a[i] * g[i];
      }
    }
    PlaneD fused = collapse_pyramid(blended);
    for (double& v : fused.data()) v = std::clamp(v, 0.0, 1.0);
    out.channel[static_cast<std::size_t>(c)] = std::move(fused);
  }
  return out;
}

inline ImageRGB fuse_exposures(std::span<const ImageRGB> imgs, const FusionParams& params = {}) {
  if (imgs.empty()) throw InvalidArgument("fuse_exposures needs at least one image");
  std::vector<ColorPlanes> planes;
  planes.reserve(imgs.size());
  for (const auto& im : imgs) planes.push_back(ColorPlanes::from_image(im));
  return fuse_exposures_planes(planes, params).to_image();
}

}  // namespace luv
