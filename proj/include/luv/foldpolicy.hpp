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

// Towel smoothing and folding heuristic driven by detected corner keypoints.
//
// Decision rule per step:
//   no corner           -> random reset (grasp anywhere on the cloth)
//   one corner          -> drag that corner toward the table center
//   two or more corners -> fling the closest pair
//   four corners whose pairwise distances fit the towel -> terminate, fold
//
// Coordinates are table-frame meters unless noted.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "luv/core.hpp"

namespace luv {

struct TowelSpec {
  double width = 0.0;   // W
  double height = 0.0;  // H, W <= H

  TowelSpec(double w, double h) : width(w), height(h) {
    if (!(w > 0.0) || !(h >= w)) throw InvalidArgument("towel must satisfy 0 < W <= H");
  }
};

struct RandomReset {
  Vec2 grasp;
};
struct DragCorner {
  Vec2 grasp;
  Vec2 place;
};
struct FlingPair {
  Vec2 grasp_a;
  Vec2 grasp_b;
};
struct Terminate {};

using SmoothAction = std::variant<RandomReset, DragCorner, FlingPair, Terminate>;

inline const char* action_name(const SmoothAction& a) {
  switch (a.index()) {
    case 0: return "random_reset";
    case 1: return "drag_corner";
    case 2: return "fling_pair";
    default: return "terminate";
  }
}

struct PolicyParams {
  Vec2 table_center{0.0, 0.0};
  /// Random-reset grasps are drawn uniformly from this box.
  Vec2 cloth_region_min{-0.3, -0.3};
  Vec2 cloth_region_max{0.3, 0.3};
  /// Drag distance; <= 0 means one towel width.
  double drag_length = 0.0;
  /// Unit vector pointing from the workspace toward the robot.
  Vec2 robot_direction{0.0, -1.0};
};

// ---------------------------------------------------------------------------
// Terminal test

/// True when the six pairwise distances, sorted, each lie within one sample
/// standard deviation (of those six distances) of the sorted template
/// {W, W, H, H, D, D}, D the diagonal.
inline bool is_smoothed(std::span<const Vec2> corners, const TowelSpec& towel) {
  if (corners.size() != 4) throw InvalidArgument("is_smoothed needs exactly 4 corners");
  std::array<double, 6> d{};
  std::size_t n = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) d[n++] = distance(corners[i], corners[j]);
  }
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / 6.0;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / 5.0);
  std::sort(d.begin(), d.end());
  const double diag = std::hypot(towel.width, towel.height);
  const std::array<double, 6> tmpl = {towel.width, towel.width, towel.height, towel.height, diag, diag};
  for (std::size_t i = 0; i < 6; ++i) {
    if (std::abs(d[i] - tmpl[i]) > sigma) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Action selection

/// Indices of the closest pair; ties resolve to the lexicographically first.
inline std::pair<std::size_t, std::size_t> closest_pair(std::span<const Vec2> pts) {
  std::pair<std::size_t, std::size_t> best{0, 1};
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dd = distance(pts[i], pts[j]);
      if (dd < best_d) {
        best_d = dd;
        best = {i, j};
      }
    }
  }
  return best;
}

inline SmoothAction select_action(std::span<const Vec2> corners, const TowelSpec& towel, std::uint64_t rng_seed,
                                  const PolicyParams& params = {}) {
  if (corners.empty()) {
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vec2 lo = params.cloth_region_min, hi = params.cloth_region_max;
    const double ux = u(rng);
    const double uy = u(rng);
    return RandomReset{{lo.x + (hi.x - lo.x) * ux, lo.y + (hi.y - lo.y) * uy}};
  }
  if (corners.size() == 1) {
    const Vec2 c = corners[0];
    const double len = params.drag_length > 0.0 ? params.drag_length : towel.width;
    const Vec2 to_center = params.table_center - c;
    const double n = norm(to_center);
    // A corner already at the center is dragged away from the robot.
    const Vec2 dir = n > 0.0 ? (1.0 / n) * to_center : -1.0 * params.robot_direction;
    return DragCorner{c, c + len * dir};
  }
  if (corners.size() == 4 && is_smoothed(corners, towel)) return Terminate{};
  const auto [i, j] = closest_pair(corners);
  return FlingPair{corners[i], corners[j]};
}

// ---------------------------------------------------------------------------
// Fold planning

struct PickPlace {
  Vec2 pick;
  Vec2 place;
};

struct FoldPlan {
  /// Bimanual: each robot-near corner onto its far partner.
  std::array<PickPlace, 2> first;
  /// Single arm: midpoint of one side edge of the halved towel onto the
  /// midpoint of the opposite side edge.
  PickPlace second;
};

inline Vec2 perpendicular(Vec2 d) noexcept { return {-d.y, d.x}; }

inline FoldPlan plan_fold(std::span<const Vec2> corners, Vec2 robot_direction) {
  if (corners.size() != 4) throw InvalidArgument("plan_fold needs exactly 4 corners");
  const double dn = norm(robot_direction);
  if (!(dn > 0.0)) throw InvalidArgument("robot direction must be nonzero");
  const Vec2 d = (1.0 / dn) * robot_direction;

  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dot(corners[a], d) > dot(corners[b], d); });
  const Vec2 near0 = corners[order[0]], near1 = corners[order[1]];
  Vec2 far0 = corners[order[2]], far1 = corners[order[3]];
  if (distance(near0, far1) + distance(near1, far0) < distance(near0, far0) + distance(near1, far1)) {
    std::swap(far0, far1);
  }

  double scale = 0.0;
  for (std::size_t i = 0; i < 4; ++i) scale = std::max(scale, distance(corners[i], corners[(i + 1) % 4]));
  const Vec2 e1 = far0 - near0, e2 = near1 - near0;
  const double area = std::abs(e1.x * e2.y - e1.y * e2.x);
  if (!(area > 1e-12 * std::max(1.0, scale * scale))) throw InvalidArgument("plan_fold: degenerate towel");

  FoldPlan plan{{PickPlace{near0, far0}, PickPlace{near1, far1}}, {}};
  const Vec2 mid0 = 0.5 * (near0 + far0);
  const Vec2 mid1 = 0.5 * (near1 + far1);
  const Vec2 edge0 = 0.5 * (far0 + mid0);
  const Vec2 edge1 = 0.5 * (far1 + mid1);
  const Vec2 p = perpendicular(d);
  if (dot(edge0, p) <= dot(edge1, p)) {
    plan.second = {edge0, edge1};
  } else {
    plan.second = {edge1, edge0};
  }
  return plan;
}

/// Corner positions after executing the plan on a rigid, perfectly folding
/// towel: step one moves each near corner to its place, step two reflects
/// everything on the pick side across the bisector of pick and place.
inline std::vector<Vec2> apply_fold(std::span<const Vec2> corners, const FoldPlan& plan) {
  std::vector<Vec2> out(corners.begin(), corners.end());
  for (Vec2& c : out) {
    for (const auto& pp : plan.first) {
      if (c == pp.pick) {
        c = pp.place;
        break;
      }
    }
  }
  const Vec2 axis = plan.second.place - plan.second.pick;
  const double len = norm(axis);
  if (len > 0.0) {
    const Vec2 n = (1.0 / len) * axis;
    const Vec2 mid = 0.5 * (plan.second.pick + plan.second.place);
    for (Vec2& c : out) {
      const double s = dot(c - mid, n);
      if (s < 0.0) c = c - (2.0 * s) * n;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grasp-point deprojection

struct PinholeIntrinsics {
  double fx, fy, cx, cy;
  PinholeIntrinsics(double fx_, double fy_, double cx_, double cy_) : fx(fx_), fy(fy_), cx(cx_), cy(cy_) {
    if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidArgument("focal lengths must be positive");
  }
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  bool operator==(const Vec3&) const = default;
};

namespace detail {
inline double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  const double hi = v[n / 2];
  if (n % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
  return 0.5 * (lo + hi);
}
}  // namespace detail

/// Per-axis median of the deprojected masked pixels with finite, positive
/// depth.
inline Vec3 median_deproject(const Plane<double>& depth, const BinaryMask& mask, const PinholeIntrinsics& k) {
  if (!depth.same_shape(mask)) throw InvalidArgument("median_deproject: depth and mask shapes differ");
  std::vector<double> xs, ys, zs;
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const double z = depth(u, v);
      if (!mask(u, v) || !std::isfinite(z) || !(z > 0.0)) continue;
      xs.push_back((u - k.cx) * z / k.fx);
      ys.push_back((v - k.cy) * z / k.fy);
      zs.push_back(z);
    }
  }
  if (zs.empty()) throw InvalidArgument("median_deproject: no valid masked depth");
  return {detail::median_of(xs), detail::median_of(ys), detail::median_of(zs)};
}

// ---------------------------------------------------------------------------
// Rollouts

inline constexpr int kDefaultActionBudget = 10;

struct Rollout {
  std::vector<SmoothAction> actions;
  bool smoothed = false;
  int smoothing_actions = 0;
  std::optional<FoldPlan> fold;
};

/// Runs select -> apply -> re-detect until Terminate or the budget of
/// smoothing actions is spent.
///
/// `scene` needs observe() and apply(const SmoothAction&); `detect` maps an
/// observation to table-frame corners.
template <typename Scene, typename Detector>
Rollout run_policy(Detector&& detect, Scene& scene, const TowelSpec& towel, const PolicyParams& params = {},
                   int max_actions = kDefaultActionBudget, std::uint64_t seed = 0) {
  Rollout r;
  for (int step = 0; step <= max_actions; ++step) {
    const std::vector<Vec2> corners = detect(scene.observe());
    if (corners.size() == 4 && is_smoothed(corners, towel)) {
      r.actions.push_back(Terminate{});
      r.smoothed = true;
      r.fold = plan_fold(corners, params.robot_direction);
      return r;
    }
    if (step == max_actions) break;
    const SmoothAction a = select_action(corners, towel, seed + static_cast<std::uint64_t>(step), params);
    r.actions.push_back(a);
    ++r.smoothing_actions;
    scene.apply(a);
  }
  return r;
}

inline nlohmann::json to_json(const SmoothAction& a) {
  auto pt = [](Vec2 v) { return nlohmann::json::array({v.x, v.y}); };
  nlohmann::json j{{"type", action_name(a)}};
  if (const auto* r = std::get_if<RandomReset>(&a)) j["grasp"] = pt(r->grasp);
  if (const auto* d = std::get_if<DragCorner>(&a)) {
    j["grasp"] = pt(d->grasp);
    j["place"] = pt(d->place);
  }
  if (const auto* f = std::get_if<FlingPair>(&a)) j["grasps"] = {pt(f->grasp_a), pt(f->grasp_b)};
  return j;
}

inline nlohmann::json to_json(const Rollout& r) {
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : r.actions) actions.push_back(to_json(a));
  nlohmann::json j{{"actions", actions},
                   {"outcome", r.smoothed ? "smoothed" : "budget_exhausted"},
                   {"smoothing_actions", r.smoothing_actions}};
  if (r.fold) {
    auto pp = [](const PickPlace& p) {
      return nlohmann::json{{"pick", {p.pick.x, p.pick.y}}, {"place", {p.place.x, p.place.y}}};
    };
    j["fold"] = {{"first", {pp(r.fold->first[0]), pp(r.fold->first[1])}}, {"second", pp(r.fold->second)}};
  }
  return j;
}

struct RolloutSummary {
  std::size_t rollouts = 0;
  double smoothing_success_rate = 0.0;
  double mean_actions = 0.0;
  double std_actions = 0.0;
};

/// Success rate and mean / sample std of smoothing-action counts.
inline RolloutSummary summarize(std::span<const Rollout> rollouts) {
  RolloutSummary s;
  s.rollouts = rollouts.size();
  if (rollouts.empty()) return s;
  double sum = 0.0;
  std::size_t ok = 0;
  for (const auto& r : rollouts) {
    sum += r.smoothing_actions;
    ok += r.smoothed;
  }
  const auto n = static_cast<double>(rollouts.size());
  s.mean_actions = sum / n;
  s.smoothing_success_rate = static_cast<double>(ok) / n;
  if (rollouts.size() > 1) {
    double ss = 0.0;
    for (const auto& r : rollouts) ss += (r.smoothing_actions - s.mean_actions) * (r.smoothing_actions - s.mean_actions);
    s.std_actions = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

}  // namespace luv
