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

// Shared domain types: images, masks, keypoints, calibration profiles and
// paired samples. Everything here is a value type; constructors and
// validate() reject invariant violations with luv::InvalidArgument.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace luv {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Rasters

/// Dense row-major 2-D array. Used for masks, weight maps, depth and HSV
/// planes.
template <typename T>
class Plane {
 public:
  Plane() = default;

  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Plane(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw InvalidArgument("plane data length does not match width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

  T* row(int y) noexcept { return data_.data() + index(0, y); }
  const T* row(int y) const noexcept { return data_.data() + index(0, y); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  bool same_shape(int w, int h) const noexcept { return w == width_ && h == height_; }
  template <typename U>
  bool same_shape(const Plane<U>& other) const noexcept {
    return other.width() == width_ && other.height() == height_;
  }

  bool operator==(const Plane&) const = default;

 private:
  static void check_dims(int w, int h) {
    if (w < 1 || h < 1) throw InvalidArgument("raster dimensions must be >= 1");
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// 0/1 per pixel.
using BinaryMask = Plane<std::uint8_t>;

/// Per-pixel class index, 0 = background.
using Mask = Plane<std::uint8_t>;

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

/// 8-bit interleaved RGB image. Math happens on normalized channels; the
/// 8-bit representation is fixed at the storage boundary.
class ImageRGB {
 public:
  ImageRGB() = default;

  ImageRGB(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    bytes_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, 0);
  }

  ImageRGB(int width, int height, std::vector<std::uint8_t> interleaved)
      : width_(width), height_(height), bytes_(std::move(interleaved)) {
    check_dims(width, height);
    if (bytes_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
      throw InvalidArgument("image byte length does not match width*height*3");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return bytes_.size() / 3; }
  bool empty() const noexcept { return bytes_.empty(); }

  Rgb8 at(int x, int y) const noexcept {
    const std::uint8_t* p = bytes_.data() + offset(x, y);
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb8 c) noexcept {
    std::uint8_t* p = bytes_.data() + offset(x, y);
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  /// Channel c of pixel (x, y) in [0, 1].
  double normalized(int x, int y, int c) const noexcept {
    return bytes_[offset(x, y) + static_cast<std::size_t>(c)] / 255.0;
  }

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  std::span<std::uint8_t> bytes() noexcept { return bytes_; }

  bool same_shape(int w, int h) const noexcept { return w == width_ && h == height_; }

  bool operator==(const ImageRGB&) const = default;

 private:
  static void check_dims(int w, int h) {
    if (w < 1 || h < 1) throw InvalidArgument("image dimensions must be >= 1");
  }
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bytes_;
};

/// Rounds a normalized channel to 8-bit storage, clamping to [0, 1].
inline std::uint8_t to_byte(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

struct Vec2 {
  double x = 0.0, y = 0.0;
  friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) noexcept { return {s * a.x, s * a.y}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) noexcept { return norm(a - b); }

// ---------------------------------------------------------------------------
// Labels

struct Keypoint {
  int class_id = 0;
  double u = 0.0;  // column, subpixel
  double v = 0.0;  // row, subpixel
  std::int64_t area = 0;
  bool operator==(const Keypoint&) const = default;
};

struct LabelSet {
  Mask mask;
  std::vector<Keypoint> keypoints;
  bool operator==(const LabelSet&) const = default;
};

// ---------------------------------------------------------------------------
// Calibration

/// Closed HSV box. Hue in degrees [0, 360); hue_min > hue_max wraps through 0.
struct HSVBand {
  double hue_min = 0.0;
  double hue_max = 360.0;
  double sat_min = 0.0;
  double sat_max = 1.0;
  double val_min = 0.0;
  double val_max = 1.0;

  HSVBand() = default;
  HSVBand(double h_lo, double h_hi, double s_lo, double s_hi, double v_lo, double v_hi)
      : hue_min(h_lo), hue_max(h_hi), sat_min(s_lo), sat_max(s_hi), val_min(v_lo), val_max(v_hi) {
    validate();
  }

  /// Every HSV triple.
  static HSVBand full() { return HSVBand(0.0, 360.0, 0.0, 1.0, 0.0, 1.0); }

  void validate() const {
    // 360 is accepted as an upper hue bound so a single band can cover the
    // whole circle without wrapping.
    auto hue_ok = [](double h) { return std::isfinite(h) && h >= 0.0 && h <= 360.0; };
    auto unit_ok = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
    if (!hue_ok(hue_min) || !hue_ok(hue_max)) throw InvalidArgument("hue bounds must lie in [0,360]");
    if (!unit_ok(sat_min) || !unit_ok(sat_max) || !unit_ok(val_min) || !unit_ok(val_max)) {
      throw InvalidArgument("saturation/value bounds must lie in [0,1]");
    }
    if (sat_min > sat_max) throw InvalidArgument("sat_min exceeds sat_max");
    if (val_min > val_max) throw InvalidArgument("val_min exceeds val_max");
  }

  bool operator==(const HSVBand&) const = default;
};

enum class PaintType { kLacquer, kDye, kWaterBased, kNaturalFluorescence };

struct ClassSpec {
  int class_id = 1;
  std::string name;
  HSVBand band;
  std::int64_t min_area = 10;
  int morphology_open_radius = 1;
  int morphology_close_radius = 1;
  PaintType paint_type = PaintType::kLacquer;
  bool keypoint_mode = false;

  void validate() const {
    if (class_id < 1 || class_id > 255) throw InvalidArgument("class_id must lie in [1,255]");
    if (min_area < 0) throw InvalidArgument("min_area must be >= 0");
    if (morphology_open_radius < 0 || morphology_close_radius < 0) {
      throw InvalidArgument("morphology radii must be >= 0");
    }
    band.validate();
  }

  bool operator==(const ClassSpec&) const = default;
};

/// Exposure is expressed in device units; the simulated and file-replay
/// cameras accept [kMinExposure, kMaxExposure].
inline constexpr double kMinExposure = 0.0;
inline constexpr double kMaxExposure = 1000.0;

struct CalibrationProfile {
  std::string name;
  std::vector<ClassSpec> classes;
  double uv_exposure = 50.0;
  double std_exposure = 50.0;
  double white_balance = 4600.0;
  int settle_delay_ms = 250;
  /// Exposure bracket for the UV capture. Empty = single exposure at
  /// uv_exposure; otherwise the bracket is captured and fused.
  std::vector<double> uv_bracket;

  void validate() const {
    if (name.empty()) throw InvalidArgument("profile name must not be empty");
    if (classes.empty()) throw InvalidArgument("profile needs at least one class");
    std::set<int> ids;
    for (const auto& c : classes) {
      c.validate();
      if (!ids.insert(c.class_id).second) {
        throw InvalidArgument("duplicate class_id " + std::to_string(c.class_id));
      }
    }
    auto in_range = [](double e) { return std::isfinite(e) && e >= kMinExposure && e <= kMaxExposure; };
    if (!in_range(uv_exposure) || !in_range(std_exposure)) {
      throw InvalidArgument("exposure outside device range");
    }
    for (double e : uv_bracket) {
      if (!in_range(e)) throw InvalidArgument("bracket exposure outside device range");
    }
    if (settle_delay_ms < 0) throw InvalidArgument("settle_delay must be >= 0");
  }

  int max_class_id() const {
    int k = 0;
    for (const auto& c : classes) k = std::max(k, c.class_id);
    return k;
  }

  const ClassSpec* find(int class_id) const {
    for (const auto& c : classes) {
      if (c.class_id == class_id) return &c;
    }
    return nullptr;
  }

  bool operator==(const CalibrationProfile&) const = default;
};

// ---------------------------------------------------------------------------
// Samples

struct ExposedImage {
  double exposure = 0.0;
  ImageRGB image;
  bool operator==(const ExposedImage&) const = default;
};

struct TimingRecord {
  double capture_seconds = 0.0;
  double label_seconds = 0.0;
  /// Seconds since the capture started at which each phase began, in order.
  std::vector<std::pair<std::string, double>> phases;

  void validate() const {
    if (!(capture_seconds >= 0.0) || !(label_seconds >= 0.0)) {
      throw InvalidArgument("timing durations must be >= 0");
    }
  }
  bool operator==(const TimingRecord&) const = default;
};

struct PairedSample {
  std::string sample_id;
  ImageRGB std_image;
  std::vector<ExposedImage> uv_images;
  std::optional<LabelSet> labels;
  TimingRecord timing;

  void validate() const {
    if (sample_id.empty()) throw InvalidArgument("sample_id must not be empty");
    if (std_image.empty()) throw InvalidArgument("sample has no standard image");
    if (uv_images.empty()) throw InvalidArgument("sample needs at least one UV image");
    const int w = std_image.width();
    const int h = std_image.height();
    for (const auto& uv : uv_images) {
      if (!uv.image.same_shape(w, h)) throw InvalidArgument("UV image dimensions differ from standard image");
    }
    if (labels && !labels->mask.same_shape(w, h)) {
      throw InvalidArgument("mask dimensions differ from image");
    }
    timing.validate();
  }

  bool operator==(const PairedSample&) const = default;
};

/// Checks that every class index in the mask is a class of the profile.
inline void validate_mask(const Mask& mask, const CalibrationProfile& profile) {
  std::array<bool, 256> allowed{};
  allowed[0] = true;
  for (const auto& c : profile.classes) allowed[static_cast<std::size_t>(c.class_id)] = true;
  for (std::uint8_t k : mask.data()) {
    if (!allowed[k]) throw InvalidArgument("mask contains class " + std::to_string(k) + " not in profile");
  }
}

}  // namespace luv
