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

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>

#include "luv/core.hpp"

namespace luv {

/// Hue in degrees [0, 360), saturation and value in [0, 1].
template <std::floating_point T>
struct Hsv {
  T h{}, s{}, v{};
  bool operator==(const Hsv&) const = default;
};

/// Hexcone RGB -> HSV. Achromatic pixels (s == 0) get hue 0.
template <std::floating_point T>
constexpr Hsv<T> rgb_to_hsv(T r, T g, T b) noexcept {
  const T mx = std::max({r, g, b});
  const T mn = std::min({r, g, b});
  const T delta = mx - mn;
  Hsv<T> out{T(0), T(0), mx};
  if (mx <= T(0) || delta <= T(0)) return out;
  out.s = delta / mx;
  T h;
  if (mx == r) {
    h = (g - b) / delta;
  } else if (mx == g) {
    h = T(2) + (b - r) / delta;
  } else {
    h = T(4) + (r - g) / delta;
  }
  h *= T(60);
  if (h < T(0)) h += T(360);
  if (h >= T(360)) h -= T(360);
  out.h = h;
  return out;
}

/// Inverse of rgb_to_hsv, returned as {r, g, b}.
template <std::floating_point T>
std::array<T, 3> hsv_to_rgb(T h, T s, T v) noexcept {
  const T c = v * s;
  const T hp = std::fmod(h, T(360)) / T(60);
  const T x = c * (T(1) - std::abs(std::fmod(hp, T(2)) - T(1)));
  const T m = v - c;
  T r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {r + m, g + m, b + m};
}

/// Closed-interval membership; a band with hue_min > hue_max wraps through 0.
template <std::floating_point T>
constexpr bool in_band(T h, T s, T v, const HSVBand& band) noexcept {
  if (s < band.sat_min || s > band.sat_max) return false;
  if (v < band.val_min || v > band.val_max) return false;
  if (band.hue_min <= band.hue_max) return h >= band.hue_min && h <= band.hue_max;
  return h >= band.hue_min || h <= band.hue_max;
}

template <std::floating_point T>
constexpr bool in_band(const Hsv<T>& p, const HSVBand& band) noexcept {
  return in_band(p.h, p.s, p.v, band);
}

using HsvPlane = Plane<Hsv<float>>;

/// Per-pixel rgb_to_hsv on normalized channels.
inline HsvPlane image_to_hsv(const ImageRGB& img) {
  HsvPlane out(img.width(), img.height());
  const auto src = img.bytes();
  auto dst = out.data();
  constexpr float kInv = 1.0f / 255.0f;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = rgb_to_hsv(src[3 * i] * kInv, src[3 * i + 1] * kInv, src[3 * i + 2] * kInv);
  }
  return out;
}

}  // namespace luv
