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

// Label-quality metrics and accounting: IOU, keypoint agreement,
// seconds-per-label statistics and the setup-cost break-even.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "luv/core.hpp"

namespace luv {

/// |A ∩ B| / |A ∪ B| over pixels where pred(a) / pred(b) hold. Both empty -> 1.
template <typename T, typename Pred>
double iou_where(const Plane<T>& a, const Plane<T>& b, Pred&& member) {
  if (!a.same_shape(b)) throw InvalidArgument("iou: dimension mismatch");
  std::int64_t inter = 0, uni = 0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const bool ia = member(da[i]);
    const bool ib = member(db[i]);
    inter += (ia && ib);
    uni += (ia || ib);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Binary IOU: nonzero pixels are members.
inline double iou(const BinaryMask& a, const BinaryMask& b) {
  return iou_where(a, b, [](std::uint8_t v) { return v != 0; });
}

/// IOU of one class in two class-index masks.
inline double class_iou(const Mask& a, const Mask& b, int class_id) {
  const auto k = static_cast<std::uint8_t>(class_id);
  return iou_where(a, b, [k](std::uint8_t v) { return v == k; });
}

struct KeypointAgreement {
  double precision = 1.0;
  double recall = 1.0;
  double mean_distance = 0.0;  // over matched pairs; 0 when none matched
  std::size_t matched = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (pred index, ref index)
};

/// Greedy matching: repeatedly take the globally closest unmatched
/// (pred, ref) pair of the same class within `radius`. Ties go to the lower
/// pred index, then lower ref index.
inline KeypointAgreement keypoint_agreement(std::span<const Keypoint> pred, std::span<const Keypoint> ref,
                                            double radius) {
  KeypointAgreement out;
  std::vector<char> pred_used(pred.size(), 0), ref_used(ref.size(), 0);
  double dist_sum = 0.0;
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred_used[i]) continue;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (ref_used[j] || pred[i].class_id != ref[j].class_id) continue;
        const double d = std::hypot(pred[i].u - ref[j].u, pred[i].v - ref[j].v);
        if (d <= radius && d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (!std::isfinite(best)) break;
    pred_used[bi] = ref_used[bj] = 1;
    out.pairs.emplace_back(bi, bj);
    dist_sum += best;
  }
  out.matched = out.pairs.size();
  out.precision = pred.empty() ? 1.0 : static_cast<double>(out.matched) / static_cast<double>(pred.size());
  out.recall = ref.empty() ? 1.0 : static_cast<double>(out.matched) / static_cast<double>(ref.size());
  out.mean_distance = out.matched ? dist_sum / static_cast<double>(out.matched) : 0.0;
  return out;
}

struct SplSummary {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  std::size_t count = 0;
};

/// Mean, median and nearest-rank 95th percentile of label_seconds.
inline SplSummary spl_summary(std::span<const TimingRecord> timings) {
  if (timings.empty()) throw InvalidArgument("spl_summary needs at least one record");
  std::vector<double> v;
  v.reserve(timings.size());
  for (const auto& t : timings) v.push_back(t.label_seconds);
  std::sort(v.begin(), v.end());
  SplSummary s;
  s.count = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const std::size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = v[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

/// Images needed before a one-time setup cost beats paying per label:
/// ceil(setup / (price_per_label * labels_per_image)). The quotient is
/// snapped to an integer when within 1e-9 relative of one, so decimal
/// prices do not push an exact quotient up by a unit.
inline std::int64_t cost_breakeven(double setup_cost, double price_per_label, double labels_per_image) {
  if (!(setup_cost > 0.0) || !(price_per_label > 0.0) || !(labels_per_image > 0.0)) {
    throw InvalidArgument("cost_breakeven inputs must be positive");
  }
  const double q = setup_cost / (price_per_label * labels_per_image);
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, std::abs(q))) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(q));
}

// ---------------------------------------------------------------------------
// Labeler comparison

struct LabeledItem {
  std::string id;
  LabelSet labels;
  std::optional<TimingRecord> timing;
};

struct EvalReport {
  std::map<int, double> per_class_iou;
  double mean_iou = 1.0;
  double pixel_precision = 1.0;
  double pixel_recall = 1.0;
  std::size_t keypoints_matched = 0;
  double keypoint_precision = 1.0;
  double keypoint_recall = 1.0;
  double keypoint_mean_distance = 0.0;
  std::optional<SplSummary> spl;
  std::size_t sample_count = 0;
};

/// Aggregates per-sample IOU over `region_classes` and keypoint agreement
/// within `keypoint_radius`. Items are paired by id; both sides must hold the
/// same id set.
inline EvalReport compare_labelers(std::span<const LabeledItem> candidate, std::span<const LabeledItem> reference,
                                   std::span<const int> region_classes, double keypoint_radius = 3.0) {
  if (candidate.size() != reference.size()) throw InvalidArgument("compare_labelers: sample counts differ");
  std::map<std::string, const LabeledItem*> ref_by_id;
  for (const auto& r : reference) ref_by_id[r.id] = &r;
  if (ref_by_id.size() != reference.size()) throw InvalidArgument("compare_labelers: duplicate reference id");

  EvalReport rep;
  rep.sample_count = candidate.size();
  std::map<int, double> iou_sum;
  std::int64_t tp = 0, fp = 0, fn = 0;
  std::size_t kp_pred = 0, kp_ref = 0;
  double kp_dist = 0.0;
  std::vector<TimingRecord> timings;
  for (const auto& c : candidate) {
    const auto it = ref_by_id.find(c.id);
    if (it == ref_by_id.end()) throw InvalidArgument("compare_labelers: no reference for id " + c.id);
    const LabelSet& a = c.labels;
    const LabelSet& b = it->second->labels;
    for (int k : region_classes) iou_sum[k] += class_iou(a.mask, b.mask, k);
    const auto da = a.mask.data();
    const auto db = b.mask.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
      if (da[i] != 0 && da[i] == db[i]) ++tp;
      else {
        if (da[i] != 0) ++fp;
        if (db[i] != 0) ++fn;
      }
    }
    const auto kp = keypoint_agreement(a.keypoints, b.keypoints, keypoint_radius);
    rep.keypoints_matched += kp.matched;
    kp_pred += a.keypoints.size();
    kp_ref += b.keypoints.size();
    kp_dist += kp.mean_distance * static_cast<double>(kp.matched);
    if (c.timing) timings.push_back(*c.timing);
  }
  double total = 0.0;
  for (int k : region_classes) {
    const double v = rep.sample_count ? iou_sum[k] / static_cast<double>(rep.sample_count) : 1.0;
    rep.per_class_iou[k] = v;
    total += v;
  }
  rep.mean_iou = region_classes.empty() ? 1.0 : total / static_cast<double>(region_classes.size());
  rep.pixel_precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  rep.pixel_recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  rep.keypoint_precision = kp_pred ? static_cast<double>(rep.keypoints_matched) / static_cast<double>(kp_pred) : 1.0;
  rep.keypoint_recall = kp_ref ? static_cast<double>(rep.keypoints_matched) / static_cast<double>(kp_ref) : 1.0;
  rep.keypoint_mean_distance = rep.keypoints_matched ? kp_dist / static_cast<double>(rep.keypoints_matched) : 0.0;
  if (!timings.empty()) rep.spl = spl_summary(timings);
  return rep;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [k, v] : r.per_class_iou) per_class[std::to_string(k)] = v;
  nlohmann::json j{{"per_class_iou", per_class},
                   {"mean_iou", r.mean_iou},
                   {"pixel_precision", r.pixel_precision},
                   {"pixel_recall", r.pixel_recall},
                   {"keypoints",
                    {{"matched", r.keypoints_matched},
                     {"precision", r.keypoint_precision},
                     {"recall", r.keypoint_recall},
                     {"mean_distance", r.keypoint_mean_distance}}},
                   {"sample_count", r.sample_count}};
  if (r.spl) j["spl"] = {{"mean", r.spl->mean}, {"median", r.spl->median}, {"p95", r.spl->p95}, {"count", r.spl->count}};
  return j;
}

/// Aligned text table: one row per task, columns IOU | SPL.
struct TableRow {
  std::string task;
  std::optional<double> iou;
  std::optional<double> spl_reference;
  std::optional<double> spl_candidate;
};

inline std::string format_table(std::span<const TableRow> rows, const std::string& reference_name = "reference",
                                const std::string& candidate_name = "LUV") {
  const std::vector<std::string> header = {"", "IOU", "SPL (" + reference_name + ")", "SPL (" + candidate_name + ")"};
  std::vector<std::vector<std::string>> cells{header};
  auto fmt = [](const std::optional<double>& v, int prec) {
    if (!v) return std::string("N/A");
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << *v;
    return os.str();
  };
  for (const auto& r : rows) cells.push_back({r.task, fmt(r.iou, 3), fmt(r.spl_reference, 3), fmt(r.spl_candidate, 3)});
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << " | ";
      os << (c == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[c])) << row[c];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace luv
