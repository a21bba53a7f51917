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

// Corner-jitter cloth: a one-number stand-in for towel state used to drive
// the smoothing policy without physics. The towel is a W x H rectangle on the
// table; `disorder` in [0, 1] controls how many corners are visible and how
// far the observed ones stray from the true rectangle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include "luv/core.hpp"
#include "luv/foldpolicy.hpp"

namespace luv {

struct ClothParams {
  double reset_min = 0.5;  // disorder after a random reset, uniform in [min, max]
  double reset_max = 1.0;
  double drag_factor = 0.75;
  double fling_factor = 0.45;
  double jitter = 0.15;      // observed-corner sigma per unit disorder, in towel widths
  double base_jitter = 0.002;  // sigma at zero disorder, in towel widths
};

class CornerJitterCloth {
 public:
  CornerJitterCloth(const TowelSpec& towel, std::uint64_t seed, ClothParams params = {})
      : towel_(towel), params_(params), rng_(seed) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double a = angle(rng_);
    const double c = std::cos(a), s = std::sin(a);
    const double hw = 0.5 * towel.width, hh = 0.5 * towel.height;
    for (Vec2 p : {Vec2{-hw, -hh}, Vec2{hw, -hh}, Vec2{hw, hh}, Vec2{-hw, hh}}) {
      corners_.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
    }
    reset();
  }

  double disorder() const noexcept { return disorder_; }
  void set_disorder(double d) { disorder_ = std::clamp(d, 0.0, 1.0); }

  /// Visible corners with position noise. A corner is visible with
  /// probability 1 - disorder.
  std::vector<Vec2> observe() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double sigma = towel_.width * (params_.base_jitter + params_.jitter * disorder_);
    std::normal_distribution<double> n(0.0, sigma);
    std::vector<Vec2> out;
    for (const Vec2& c : corners_) {
      if (u(rng_) < disorder_) continue;
      out.push_back({c.x + n(rng_), c.y + n(rng_)});
    }
    return out;
  }

  void apply(const SmoothAction& a) {
    if (std::holds_alternative<RandomReset>(a)) reset();
    if (std::holds_alternative<DragCorner>(a)) disorder_ *= params_.drag_factor;
    if (std::holds_alternative<FlingPair>(a)) disorder_ *= params_.fling_factor;
  }

 private:
  void reset() {
    std::uniform_real_distribution<double> u(params_.reset_min, params_.reset_max);
    disorder_ = u(rng_);
  }

  TowelSpec towel_;
  ClothParams params_;
  std::mt19937_64 rng_;
  std::vector<Vec2> corners_;
  double disorder_ = 1.0;
};

}  // namespace luv
