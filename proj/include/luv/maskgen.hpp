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

// Label extraction from UV images: per-class HSV threshold, morphological
// cleanup, 8-connected components, area filtering, and keypoint reduction.

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "luv/colorops.hpp"
#include "luv/core.hpp"
#include "luv/fusion.hpp"

namespace luv {

struct BoundingBox {
  int u_min = 0, v_min = 0, u_max = 0, v_max = 0;  // inclusive
  bool operator==(const BoundingBox&) const = default;
};

struct BlobStats {
  int class_id = 0;
  std::int64_t pixel_count = 0;
  double centroid_u = 0.0;
  double centroid_v = 0.0;
  BoundingBox bbox;
  bool operator==(const BlobStats&) const = default;
};

inline BinaryMask threshold_class(const HsvPlane& hsv, const HSVBand& band) {
  BinaryMask out(hsv.width(), hsv.height());
  const auto src = hsv.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = in_band(src[i], band) ? 1 : 0;
  return out;
}

inline BinaryMask threshold_class(const ImageRGB& uv_img, const ClassSpec& spec) {
  return threshold_class(image_to_hsv(uv_img), spec.band);
}

namespace detail {

/// Half-widths of a digital disk: row dy spans [-w, w] with w = floor(sqrt(r^2 - dy^2)).
inline std::vector<int> disk_half_widths(int radius) {
  std::vector<int> w(static_cast<std::size_t>(2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy) {
    w[static_cast<std::size_t>(dy + radius)] =
        static_cast<int>(std::floor(std::sqrt(static_cast<double>(radius * radius - dy * dy)) + 1e-9));
  }
  return w;
}

/// Erosion (erode = true) or dilation with a disk. Pixels outside the raster
/// are neutral: they never erode a foreground pixel and never dilate into
/// one. Each row segment test is O(1) via per-row prefix counts of ones.
inline BinaryMask morph_disk(const BinaryMask& in, int radius, bool erode) {
  if (radius <= 0) return in;
  const int w = in.width();
  const int h = in.height();
  std::vector<std::int32_t> prefix(static_cast<std::size_t>(h) * static_cast<std::size_t>(w + 1));
  for (int y = 0; y < h; ++y) {
    std::int32_t* p = prefix.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(w + 1);
    const std::uint8_t* r = in.row(y);
    p[0] = 0;
    for (int x = 0; x < w; ++x) p[x + 1] = p[x] + (r[x] != 0);
  }
  const std::vector<int> half = disk_half_widths(radius);
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    std::uint8_t* o = out.row(y);
    for (int x = 0; x < w; ++x) {
      bool result = erode;
      for (int dy = -radius; dy <= radius && result == erode; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        const int hw = half[static_cast<std::size_t>(dy + radius)];
        const int a = std::max(0, x - hw);
        const int b = std::min(w - 1, x + hw);
        const std::int32_t* p = prefix.data() + static_cast<std::size_t>(yy) * static_cast<std::size_t>(w + 1);
        const std::int32_t ones = p[b + 1] - p[a];
        if (erode) {
          if (ones != b - a + 1) result = false;
        } else if (ones > 0) {
          result = true;
        }
      }
      o[x] = result ? 1 : 0;
    }
  }
  return out;
}

}  // namespace detail

/// Opening with a disk of open_radius, then closing with close_radius.
/// A zero radius skips that stage.
inline BinaryMask morph_clean(const BinaryMask& mask, int open_radius, int close_radius) {
  if (open_radius < 0 || close_radius < 0) throw InvalidArgument("morphology radii must be >= 0");
  BinaryMask m = mask;
  if (open_radius > 0) {
    m = detail::morph_disk(detail::morph_disk(m, open_radius, true), open_radius, false);
  }
  if (close_radius > 0) {
    m = detail::morph_disk(detail::morph_disk(m, close_radius, false), close_radius, true);
  }
  return m;
}

struct ComponentLabels {
  Plane<std::int32_t> labels;  // -1 = background, else index into blobs
  std::vector<BlobStats> blobs;
};

/// 8-connected components. Components are numbered in raster order of their
/// first pixel, i.e. by (min v, then min u on that row).
inline ComponentLabels label_components(const BinaryMask& mask, int class_id = 0) {
  const int w = mask.width();
  const int h = mask.height();
  ComponentLabels out{Plane<std::int32_t>(w, h, -1), {}};
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < h; ++y0) {
    const std::uint8_t* row = mask.row(y0);
    for (int x0 = 0; x0 < w; ++x0) {
      if (!row[x0] || out.labels(x0, y0) >= 0) continue;
      const auto id = static_cast<std::int32_t>(out.blobs.size());
      BlobStats blob;
      blob.class_id = class_id;
      blob.bbox = {x0, y0, x0, y0};
      double su = 0.0, sv = 0.0;
      out.labels(x0, y0) = id;
      stack.assign(1, {x0, y0});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++blob.pixel_count;
        su += x;
        sv += y;
        blob.bbox.u_min = std::min(blob.bbox.u_min, x);
        blob.bbox.u_max = std::max(blob.bbox.u_max, x);
        blob.bbox.v_min = std::min(blob.bbox.v_min, y);
        blob.bbox.v_max = std::max(blob.bbox.v_max, y);
        for (int dy = -1; dy <= 1; ++dy) {
          const int yy = y + dy;
          if (yy < 0 || yy >= h) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx;
            if (xx < 0 || xx >= w || (dx == 0 && dy == 0)) continue;
            if (mask(xx, yy) && out.labels(xx, yy) < 0) {
              out.labels(xx, yy) = id;
              stack.emplace_back(xx, yy);
            }
          }
        }
      }
      blob.centroid_u = su / static_cast<double>(blob.pixel_count);
      blob.centroid_v = sv / static_cast<double>(blob.pixel_count);
      out.blobs.push_back(blob);
    }
  }
  return out;
}

inline std::vector<BlobStats> connected_components(const BinaryMask& mask) {
  return label_components(mask).blobs;
}

/// Fuses a bracket if needed. Throws InvalidArgument on an empty list or
/// mismatched dimensions.
inline ImageRGB combine_uv(std::span<const ExposedImage> uv_imgs) {
  if (uv_imgs.empty()) throw InvalidArgument("extract_labels needs at least one UV image");
  const int w = uv_imgs.front().image.width();
  const int h = uv_imgs.front().image.height();
  for (const auto& e : uv_imgs) {
    if (!e.image.same_shape(w, h)) throw InvalidArgument("UV image dimensions differ");
  }
  if (uv_imgs.size() == 1) return uv_imgs.front().image;
  std::vector<ImageRGB> images;
  images.reserve(uv_imgs.size());
  for (const auto& e : uv_imgs) images.push_back(e.image);
  return fuse_exposures(images);
}

/// Labels an already-combined UV image with the profile.
///
/// Classes run in profile order. Keypoint-mode classes contribute blob
/// centroids and leave the mask untouched; region classes write their id,
/// overwriting earlier classes where bands overlap.
inline LabelSet extract_labels(const ImageRGB& uv, const CalibrationProfile& profile) {
  profile.validate();
  const HsvPlane hsv = image_to_hsv(uv);
  LabelSet out{Mask(uv.width(), uv.height()), {}};
  for (const ClassSpec& spec : profile.classes) {
    const BinaryMask cleaned =
        morph_clean(threshold_class(hsv, spec.band), spec.morphology_open_radius, spec.morphology_close_radius);
    ComponentLabels comps = label_components(cleaned, spec.class_id);
    std::vector<char> keep(comps.blobs.size(), 0);
    for (std::size_t i = 0; i < comps.blobs.size(); ++i) {
      const BlobStats& b = comps.blobs[i];
      if (b.pixel_count < spec.min_area) continue;
      keep[i] = 1;
      if (spec.keypoint_mode) out.keypoints.push_back({spec.class_id, b.centroid_u, b.centroid_v, b.pixel_count});
    }
    if (spec.keypoint_mode) continue;
    const auto labels = comps.labels.data();
    auto dst = out.mask.data();
    const auto cls = static_cast<std::uint8_t>(spec.class_id);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] >= 0 && keep[static_cast<std::size_t>(labels[i])]) dst[i] = cls;
    }
  }
  return out;
}

inline LabelSet extract_labels(std::span<const ExposedImage> uv_imgs, const CalibrationProfile& profile) {
  return extract_labels(combine_uv(uv_imgs), profile);
}

}  // namespace luv
