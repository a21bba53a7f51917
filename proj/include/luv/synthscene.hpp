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

// Synthetic paired scenes with exact ground truth.
//
// A scene is a list of flat objects drawn in order over a textured
// background. Under standard light each object shows its base color, and
// paint is invisible. Under UV light everything unpainted is dimmed and the
// painted regions emit their fluorescent color. Ground truth comes straight
// from the rasterized geometry and never touches the thresholding pipeline.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "luv/colorops.hpp"
#include "luv/core.hpp"

namespace luv {

enum class Archetype { kTowel, kCable, kNeedle, kDistractor };

NLOHMANN_JSON_SERIALIZE_ENUM(Archetype, {
    {Archetype::kTowel, "towel"},
    {Archetype::kCable, "cable"},
    {Archetype::kNeedle, "needle"},
    {Archetype::kDistractor, "distractor"},
})

struct Color {
  double r = 0.0, g = 0.0, b = 0.0;
  bool operator==(const Color&) const = default;
};

/// Class ids used by the generated scenes and their companion profiles.
inline constexpr int kTowelCornerClass = 1;
inline constexpr int kCableClass = 2;
inline constexpr int kNeedleClass = 3;

struct SceneObject {
  Archetype archetype = Archetype::kDistractor;
  bool painted = false;
  int class_id = 0;
  Color base_color{0.5, 0.5, 0.5};
  Color fluor_color{1.0, 0.0, 0.0};
  /// Brightness of the paint (or material) under UV relative to fluor_color.
  double fluor_strength = 1.0;
  bool white_material = false;
  /// Towel: 4 vertices. Cable, needle: polyline. Distractor: polygon.
  std::vector<Vec2> points;
  /// Cable/needle: stroke radius. Towel: radius of each painted corner patch.
  double thickness = 3.0;
  bool operator==(const SceneObject&) const = default;
};

struct Background {
  Color base{0.55, 0.47, 0.38};
  double texture_amplitude = 0.04;
  double texture_period = 23.0;
  bool operator==(const Background&) const = default;
};

struct SceneSpec {
  int width = 640;
  int height = 480;
  std::uint64_t seed = 0;
  std::vector<SceneObject> objects;
  Background background;
  /// White materials glow faint blue under UV.
  bool ambient_blue_fluorescence = true;
  double noise_sigma = 0.0;
  /// Exposure (device units) at which the sensor gain is 1.
  double reference_exposure = 50.0;
  double uv_dim = 0.15;
  /// Distractor hues keep at least this many degrees away from the base hue
  /// of every classed object when randomized. 0 disables.
  double distractor_hue_margin = 0.0;
  bool operator==(const SceneSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Rasterization

namespace detail {

struct SceneRaster {
  Plane<std::int16_t> owner;  // object index, -1 = background
  Plane<std::uint8_t> paint;  // 1 where the visible surface is painted
};

inline double segment_distance2(Vec2 p, Vec2 a, Vec2 b) noexcept {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 d = p - (a + t * ab);
  return dot(d, d);
}

inline bool inside_polygon(Vec2 p, const std::vector<Vec2>& poly) noexcept {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

struct PixelBox {
  int x0, y0, x1, y1;  // inclusive, clipped
};

inline PixelBox clip_box(double xmin, double ymin, double xmax, double ymax, int w, int h) {
  return {std::max(0, static_cast<int>(std::floor(xmin))), std::max(0, static_cast<int>(std::floor(ymin))),
          std::min(w - 1, static_cast<int>(std::ceil(xmax))), std::min(h - 1, static_cast<int>(std::ceil(ymax)))};
}

template <typename Inside>
void fill_shape(SceneRaster& r, PixelBox box, std::int16_t id, std::uint8_t paint, Inside&& inside) {
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) {
      if (inside(Vec2{static_cast<double>(x), static_cast<double>(y)})) {
        r.owner(x, y) = id;
        r.paint(x, y) = paint;
      }
    }
  }
}

inline void draw_disk(SceneRaster& r, Vec2 c, double radius, std::int16_t id, std::uint8_t paint) {
  const PixelBox box = clip_box(c.x - radius, c.y - radius, c.x + radius, c.y + radius, r.owner.width(),
                                r.owner.height());
  const double r2 = radius * radius;
  fill_shape(r, box, id, paint, [&](Vec2 p) { return dot(p - c, p - c) <= r2; });
}

inline void draw_stroke(SceneRaster& r, const std::vector<Vec2>& pts, double radius, std::int16_t id,
                        std::uint8_t paint) {
  const double r2 = radius * radius;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i], b = pts[i + 1];
    const PixelBox box = clip_box(std::min(a.x, b.x) - radius, std::min(a.y, b.y) - radius,
                                  std::max(a.x, b.x) + radius, std::max(a.y, b.y) + radius, r.owner.width(),
                                  r.owner.height());
    fill_shape(r, box, id, paint, [&](Vec2 p) { return segment_distance2(p, a, b) <= r2; });
  }
  if (pts.size() == 1) draw_disk(r, pts[0], radius, id, paint);
}

inline void draw_polygon(SceneRaster& r, const std::vector<Vec2>& poly, std::int16_t id, std::uint8_t paint) {
  if (poly.size() < 3) return;
  double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
  for (const Vec2& p : poly) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  fill_shape(r, clip_box(xmin, ymin, xmax, ymax, r.owner.width(), r.owner.height()), id, paint,
             [&](Vec2 p) { return inside_polygon(p, poly); });
}

inline SceneRaster rasterize(const SceneSpec& spec) {
  SceneRaster r{Plane<std::int16_t>(spec.width, spec.height, -1), Plane<std::uint8_t>(spec.width, spec.height, 0)};
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const SceneObject& o = spec.objects[i];
    const auto id = static_cast<std::int16_t>(i);
    const std::uint8_t painted = o.painted ? 1 : 0;
    switch (o.archetype) {
      case Archetype::kTowel:
        draw_polygon(r, o.points, id, 0);
        for (const Vec2& v : o.points) draw_disk(r, v, o.thickness, id, painted);
        break;
      case Archetype::kCable:
      case Archetype::kNeedle:
        draw_stroke(r, o.points, o.thickness, id, painted);
        break;
      case Archetype::kDistractor:
        draw_polygon(r, o.points, id, painted);
        break;
    }
  }
  return r;
}

inline Color background_color(const Background& bg, int x, int y) noexcept {
  const double t = bg.texture_amplitude * std::sin(2.0 * std::numbers::pi * (x + 0.37 * y) / bg.texture_period);
  return {bg.base.r * (1.0 + t), bg.base.g * (1.0 + t), bg.base.b * (1.0 + t)};
}

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double exposure_gain(const SceneSpec& spec, double exposure) {
  return std::max(0.0, exposure) / spec.reference_exposure;
}

/// Applies gain, exposure-scaled noise and clipping, and quantizes.
template <typename ColorAt>
ImageRGB expose(const SceneSpec& spec, double exposure, std::uint64_t stream, ColorAt&& color_at) {
  ImageRGB img(spec.width, spec.height);
  const double gain = exposure_gain(spec, exposure);
  if (gain <= 0.0) return img;
  const double sigma = spec.noise_sigma * std::min(1.0, gain);
  std::mt19937_64 rng(mix64(spec.seed ^ mix64(stream ^ std::bit_cast<std::uint64_t>(exposure))));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const Color c = color_at(x, y);
      double ch[3] = {c.r * gain, c.g * gain, c.b * gain};
      if (sigma > 0.0) {
        for (double& v : ch) v += sigma * noise(rng);
      }
      img.set(x, y, {to_byte(ch[0]), to_byte(ch[1]), to_byte(ch[2])});
    }
  }
  return img;
}

}  // namespace detail

inline ImageRGB render_standard(const SceneSpec& spec, double exposure) {
  const detail::SceneRaster r = detail::rasterize(spec);
  return detail::expose(spec, exposure, 0x5354'4400ULL, [&](int x, int y) {
    const int id = r.owner(x, y);
    return id >= 0 ? spec.objects[static_cast<std::size_t>(id)].base_color
                   : detail::background_color(spec.background, x, y);
  });
}

inline constexpr Color kAmbientBlueGlow{0.02, 0.04, 0.22};

inline ImageRGB render_uv(const SceneSpec& spec, double exposure) {
  const detail::SceneRaster r = detail::rasterize(spec);
  return detail::expose(spec, exposure, 0x5556'0000ULL, [&](int x, int y) -> Color {
    const int id = r.owner(x, y);
    if (id < 0) {
      const Color c = detail::background_color(spec.background, x, y);
      return {c.r * spec.uv_dim, c.g * spec.uv_dim, c.b * spec.uv_dim};
    }
    const SceneObject& o = spec.objects[static_cast<std::size_t>(id)];
    if (r.paint(x, y)) {
      return {o.fluor_color.r * o.fluor_strength, o.fluor_color.g * o.fluor_strength,
              o.fluor_color.b * o.fluor_strength};
    }
    Color c{o.base_color.r * spec.uv_dim, o.base_color.g * spec.uv_dim, o.base_color.b * spec.uv_dim};
    if (o.white_material && spec.ambient_blue_fluorescence) {
      c.r += kAmbientBlueGlow.r;
      c.g += kAmbientBlueGlow.g;
      c.b += kAmbientBlueGlow.b;
    }
    return c;
  });
}

/// Exact labels from geometry. Towel objects yield corner keypoints (their
/// class is a keypoint class); every other painted classed object writes its
/// visible painted pixels into the mask, later objects winning.
inline LabelSet ground_truth(const SceneSpec& spec) {
  const detail::SceneRaster r = detail::rasterize(spec);
  LabelSet out{Mask(spec.width, spec.height), {}};
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const int id = r.owner(x, y);
      if (id < 0 || !r.paint(x, y)) continue;
      const SceneObject& o = spec.objects[static_cast<std::size_t>(id)];
      if (o.class_id > 0 && o.archetype != Archetype::kTowel) out.mask(x, y) = static_cast<std::uint8_t>(o.class_id);
    }
  }
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const SceneObject& o = spec.objects[i];
    if (o.archetype != Archetype::kTowel || !o.painted || o.class_id <= 0) continue;
    for (const Vec2& v : o.points) {
      std::int64_t area = 0;
      const double r2 = o.thickness * o.thickness;
      const auto box = detail::clip_box(v.x - o.thickness, v.y - o.thickness, v.x + o.thickness, v.y + o.thickness,
                                        spec.width, spec.height);
      for (int y = box.y0; y <= box.y1; ++y) {
        for (int x = box.x0; x <= box.x1; ++x) {
          const double dx = x - v.x, dy = y - v.y;
          if (dx * dx + dy * dy <= r2) ++area;
        }
      }
      out.keypoints.push_back({o.class_id, v.x, v.y, area});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scene generation

namespace detail {

inline Color hsv_color(double h, double s, double v) {
  const auto c = hsv_to_rgb(h, s, v);
  return {c[0], c[1], c[2]};
}

inline double hue_distance(double a, double b) noexcept {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

inline Vec2 rotate(Vec2 p, double angle) noexcept {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

inline void randomize_towel(SceneObject& o, const SceneSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double m = std::min(spec.width, spec.height);
  o.thickness = std::max(4.0, std::round(m * 0.015));
  const double w = m * (0.30 + 0.12 * u(rng));
  const double h = w * (1.0 + 0.3 * u(rng));
  const double angle = 2.0 * std::numbers::pi * u(rng);
  std::normal_distribution<double> jitter(0.0, 0.02 * w);
  std::vector<Vec2> local = {{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}};
  double ext_x = 0.0, ext_y = 0.0;
  for (Vec2& p : local) {
    p = rotate(p, angle) + Vec2{std::clamp(jitter(rng), -0.05 * w, 0.05 * w), std::clamp(jitter(rng), -0.05 * w, 0.05 * w)};
    ext_x = std::max(ext_x, std::abs(p.x));
    ext_y = std::max(ext_y, std::abs(p.y));
  }
  const double margin = o.thickness + 4.0;
  const double cx_lo = ext_x + margin, cx_hi = spec.width - 1 - ext_x - margin;
  const double cy_lo = ext_y + margin, cy_hi = spec.height - 1 - ext_y - margin;
  const double cx = cx_lo < cx_hi ? cx_lo + (cx_hi - cx_lo) * u(rng) : spec.width / 2.0;
  const double cy = cy_lo < cy_hi ? cy_lo + (cy_hi - cy_lo) * u(rng) : spec.height / 2.0;
  o.points.clear();
  for (const Vec2& p : local) o.points.push_back(p + Vec2{cx, cy});
}

/// Random walk with bounded turning, steered back toward the canvas center
/// near the borders. Self-crossings are allowed.
inline void randomize_cable(SceneObject& o, const SceneSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double m = std::min(spec.width, spec.height);
  o.thickness = std::max(2.0, m * 0.008);
  const double step = m * 0.03;
  const double margin = m * 0.08;
  const Vec2 center{spec.width / 2.0, spec.height / 2.0};
  Vec2 p{margin + (spec.width - 2 * margin) * u(rng), margin + (spec.height - 2 * margin) * u(rng)};
  double heading = 2.0 * std::numbers::pi * u(rng);
  o.points.assign(1, p);
  for (int i = 0; i < 40; ++i) {
    heading += (u(rng) - 0.5) * 0.7;
    Vec2 next = p + step * Vec2{std::cos(heading), std::sin(heading)};
    if (next.x < margin || next.x > spec.width - margin || next.y < margin || next.y > spec.height - margin) {
      const Vec2 to_c = center - p;
      heading = std::atan2(to_c.y, to_c.x) + (u(rng) - 0.5) * 0.5;
      next = p + step * Vec2{std::cos(heading), std::sin(heading)};
    }
    p = next;
    o.points.push_back(p);
  }
}

inline void randomize_needle(SceneObject& o, const SceneSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double m = std::min(spec.width, spec.height);
  o.thickness = std::max(2.0, m * 0.004);
  const double radius = m * (0.06 + 0.06 * u(rng));
  const double margin = radius + o.thickness + 4.0;
  const Vec2 c{margin + (spec.width - 2 * margin) * u(rng), margin + (spec.height - 2 * margin) * u(rng)};
  const double a0 = 2.0 * std::numbers::pi * u(rng);
  o.points.clear();
  constexpr int kSegments = 48;
  for (int i = 0; i <= kSegments; ++i) {
    const double a = a0 + std::numbers::pi * i / kSegments;
    o.points.push_back(c + radius * Vec2{std::cos(a), std::sin(a)});
  }
}

inline void randomize_distractor(SceneObject& o, const SceneSpec& spec, const std::vector<double>& protected_hues,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double m = std::min(spec.width, spec.height);
  const double radius = m * (0.04 + 0.05 * u(rng));
  const Vec2 c{radius + (spec.width - 2 * radius) * u(rng), radius + (spec.height - 2 * radius) * u(rng)};
  o.points.clear();
  constexpr int kVertices = 7;
  const double a0 = 2.0 * std::numbers::pi * u(rng);
  for (int i = 0; i < kVertices; ++i) {
    const double a = a0 + 2.0 * std::numbers::pi * i / kVertices;
    const double r = radius * (0.6 + 0.4 * u(rng));
    o.points.push_back(c + r * Vec2{std::cos(a), std::sin(a)});
  }
  double hue = 360.0 * u(rng);
  for (int tries = 0; tries < 64 && spec.distractor_hue_margin > 0.0; ++tries) {
    const bool clear = std::all_of(protected_hues.begin(), protected_hues.end(),
                                   [&](double ph) { return hue_distance(hue, ph) >= spec.distractor_hue_margin; });
    if (clear) break;
    hue = 360.0 * u(rng);
  }
  o.base_color = hsv_color(hue, 0.4 + 0.5 * u(rng), 0.4 + 0.5 * u(rng));
}

}  // namespace detail

/// Regenerates every object's pose and shape (and distractor colors) from
/// `seed`, keeping archetypes, classes, paint flags and materials.
inline SceneSpec randomize(const SceneSpec& spec, std::uint64_t seed) {
  SceneSpec out = spec;
  out.seed = seed;
  std::mt19937_64 rng(detail::mix64(seed ^ 0x4c55'5653ULL));
  std::vector<double> protected_hues;
  for (const auto& o : spec.objects) {
    if (o.class_id > 0) {
      protected_hues.push_back(rgb_to_hsv(o.base_color.r, o.base_color.g, o.base_color.b).h);
    }
  }
  for (SceneObject& o : out.objects) {
    switch (o.archetype) {
      case Archetype::kTowel: detail::randomize_towel(o, out, rng); break;
      case Archetype::kCable: detail::randomize_cable(o, out, rng); break;
      case Archetype::kNeedle: detail::randomize_needle(o, out, rng); break;
      case Archetype::kDistractor: detail::randomize_distractor(o, out, protected_hues, rng); break;
    }
  }
  return out;
}

enum class SceneKind { kTowel, kCable, kNeedle, kMixed };

NLOHMANN_JSON_SERIALIZE_ENUM(SceneKind, {
    {SceneKind::kTowel, "towel"},
    {SceneKind::kCable, "cable"},
    {SceneKind::kNeedle, "needle"},
    {SceneKind::kMixed, "mixed"},
})

/// Strict parse; unknown names throw instead of mapping to the first kind.
inline SceneKind parse_scene_kind(const std::string& name) {
  const SceneKind k = nlohmann::json(name).get<SceneKind>();
  if (nlohmann::json(k).get<std::string>() != name) throw InvalidArgument("unknown scene kind '" + name + "'");
  return k;
}

inline SceneObject make_towel_object() {
  SceneObject o;
  o.archetype = Archetype::kTowel;
  o.painted = true;
  o.class_id = kTowelCornerClass;
  o.base_color = {0.92, 0.92, 0.90};
  o.fluor_color = {1.0, 0.85, 0.10};
  o.white_material = true;
  return o;
}

inline SceneObject make_cable_object() {
  SceneObject o;
  o.archetype = Archetype::kCable;
  o.painted = true;
  o.class_id = kCableClass;
  o.base_color = {0.15, 0.30, 0.80};
  o.fluor_color = {0.10, 1.0, 0.20};
  return o;
}

inline SceneObject make_needle_object() {
  SceneObject o;
  o.archetype = Archetype::kNeedle;
  o.painted = true;
  o.class_id = kNeedleClass;
  o.base_color = {0.75, 0.75, 0.78};
  o.fluor_color = {1.0, 0.08, 0.12};
  return o;
}

/// A randomized scene of the given kind: distractors first, painted objects
/// on top.
inline SceneSpec make_scene(SceneKind kind, int width, int height, std::uint64_t seed, double noise_sigma = 0.0,
                            int distractors = 3) {
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.noise_sigma = noise_sigma;
  for (int i = 0; i < distractors; ++i) spec.objects.push_back(SceneObject{});
  if (kind == SceneKind::kTowel || kind == SceneKind::kMixed) spec.objects.push_back(make_towel_object());
  if (kind == SceneKind::kCable || kind == SceneKind::kMixed) spec.objects.push_back(make_cable_object());
  if (kind == SceneKind::kNeedle || kind == SceneKind::kMixed) spec.objects.push_back(make_needle_object());
  return randomize(spec, seed);
}

/// Copy of the scene with every paint flag cleared.
inline SceneSpec unpainted(SceneSpec spec) {
  for (auto& o : spec.objects) o.painted = false;
  return spec;
}

/// Calibration profile whose bands bracket each painted class's fluorescent
/// hue. Towel corners are keypoint classes; thin strokes skip morphology.
inline CalibrationProfile companion_profile(const SceneSpec& spec, const std::string& name = "synth") {
  CalibrationProfile p;
  p.name = name;
  p.uv_exposure = spec.reference_exposure;
  p.std_exposure = spec.reference_exposure;
  std::vector<int> seen;
  for (const auto& o : spec.objects) {
    if (o.class_id <= 0 || std::find(seen.begin(), seen.end(), o.class_id) != seen.end()) continue;
    seen.push_back(o.class_id);
    ClassSpec c;
    c.class_id = o.class_id;
    const double h = rgb_to_hsv(o.fluor_color.r, o.fluor_color.g, o.fluor_color.b).h;
    const double lo = std::fmod(h - 20.0 + 360.0, 360.0);
    const double hi = std::fmod(h + 20.0, 360.0);
    c.band = HSVBand(lo, hi, 0.5, 1.0, 0.3, 1.0);
    switch (o.archetype) {
      case Archetype::kTowel:
        c.name = "towel_corner";
        c.keypoint_mode = true;
        break;
      case Archetype::kCable:
        c.name = "cable";
        c.morphology_open_radius = 0;
        c.morphology_close_radius = 0;
        break;
      case Archetype::kNeedle:
        c.name = "needle";
        c.morphology_open_radius = 0;
        c.morphology_close_radius = 0;
        break;
      case Archetype::kDistractor:
        c.name = "class" + std::to_string(o.class_id);
        break;
    }
    p.classes.push_back(c);
  }
  std::sort(p.classes.begin(), p.classes.end(),
            [](const ClassSpec& a, const ClassSpec& b) { return a.class_id < b.class_id; });
  return p;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const Color& c) { j = nlohmann::json::array({c.r, c.g, c.b}); }
inline void from_json(const nlohmann::json& j, Color& c) {
  c = {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}
inline void to_json(nlohmann::json& j, const Vec2& v) { j = nlohmann::json::array({v.x, v.y}); }
inline void from_json(const nlohmann::json& j, Vec2& v) { v = {j.at(0).get<double>(), j.at(1).get<double>()}; }

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SceneObject, archetype, painted, class_id, base_color, fluor_color,
                                                fluor_strength, white_material, points, thickness)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Background, base, texture_amplitude, texture_period)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SceneSpec, width, height, seed, objects, background,
                                                ambient_blue_fluorescence, noise_sigma, reference_exposure, uv_dim,
                                                distractor_hue_margin)

}  // namespace luv
