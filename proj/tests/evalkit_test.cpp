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

#include <gtest/gtest.h>

#include <algorithm>
#include <tuple>

#include "luv/evalkit.hpp"
#include "luv/maskgen.hpp"
#include "luv/synthscene.hpp"
#include "test_support.hpp"

namespace luv {
namespace {

using testing::Gen;

TEST(Iou, HandCases) {
  BinaryMask a(3, 3), b(3, 3);
  a(0, 0) = a(0, 1) = 1;
  b(0, 1) = b(0, 2) = 1;
  EXPECT_DOUBLE_EQ(iou(a, b), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  BinaryMask c(3, 3);
  c(2, 2) = 1;
  EXPECT_DOUBLE_EQ(iou(a, c), 0.0);
  EXPECT_DOUBLE_EQ(iou(BinaryMask(3, 3), BinaryMask(3, 3)), 1.0);
  EXPECT_THROW(iou(a, BinaryMask(2, 3)), InvalidArgument);
}

TEST(Iou, ClassIouIgnoresOtherClasses) {
  Mask a(4, 1, std::vector<std::uint8_t>{1, 1, 2, 0});
  Mask b(4, 1, std::vector<std::uint8_t>{1, 2, 2, 2});
  EXPECT_DOUBLE_EQ(class_iou(a, b, 1), 0.5);
  EXPECT_DOUBLE_EQ(class_iou(a, b, 2), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(class_iou(a, b, 7), 1.0);
}

TEST(Iou, SymmetricBoundedAndSelfIdentity) {
  Gen g(1);
  for (int i = 0; i < 200; ++i) {
    const int w = g.integer(1, 20), h = g.integer(1, 20);
    const auto a = g.mask(w, h, g.uniform()), b = g.mask(w, h, g.uniform());
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_EQ(iou(a, a), 1.0);
  }
}

// Sort all in-radius candidate pairs by (distance, pred, ref) and take each
// pair whose endpoints are both still free.
std::vector<std::pair<std::size_t, std::size_t>> sorted_greedy(const std::vector<Keypoint>& p,
                                                              const std::vector<Keypoint>& r, double radius) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (p[i].class_id != r[j].class_id) continue;
      const double d = std::hypot(p[i].u - r[j].u, p[i].v - r[j].v);
      if (d <= radius) cand.emplace_back(d, i, j);
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> pu(p.size()), ru(r.size());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [d, i, j] : cand) {
    if (pu[i] || ru[j]) continue;
    pu[i] = ru[j] = true;
    out.emplace_back(i, j);
  }
  return out;
}

TEST(KeypointAgreement, IdenticalAndEmpty) {
  const std::vector<Keypoint> k = {{1, 1, 2, 5}, {1, 10, 2, 5}, {2, 4, 4, 5}};
  const auto same = keypoint_agreement(k, k, 1.0);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.mean_distance, 0.0);
  const auto none = keypoint_agreement({}, k, 1.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.precision, 1.0);
}

TEST(KeypointAgreement, ClassMismatchNeverMatches) {
  const std::vector<Keypoint> a = {{1, 0, 0, 1}}, b = {{2, 0, 0, 1}};
  EXPECT_EQ(keypoint_agreement(a, b, 10.0).matched, 0u);
}

TEST(KeypointAgreement, MatchesSortedGreedyOracle) {
  Gen g(2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Keypoint> p, r;
    for (int i = 0; i < 10; ++i) {
      p.push_back({g.integer(1, 2), static_cast<double>(g.integer(0, 12)), static_cast<double>(g.integer(0, 12)), 1});
      r.push_back({g.integer(1, 2), static_cast<double>(g.integer(0, 12)), static_cast<double>(g.integer(0, 12)), 1});
    }
    const double radius = g.uniform(0.5, 6.0);
    const auto got = keypoint_agreement(p, r, radius);
    EXPECT_EQ(got.pairs, sorted_greedy(p, r, radius)) << "trial " << trial;
    EXPECT_DOUBLE_EQ(got.precision, static_cast<double>(got.matched) / 10.0);
  }
}

TEST(SplSummary, Statistics) {
  EXPECT_DOUBLE_EQ(spl_summary(std::vector<TimingRecord>{{0.0, 0.2, {}}}).mean, 0.2);
  const std::vector<TimingRecord> two = {{0.0, 0.1, {}}, {0.0, 0.3, {}}};
  EXPECT_DOUBLE_EQ(spl_summary(two).mean, 0.2);
  EXPECT_DOUBLE_EQ(spl_summary(two).median, 0.2);
  std::vector<TimingRecord> many;
  for (int i = 1; i <= 100; ++i) many.push_back({0.0, i / 100.0, {}});
  const auto s = spl_summary(many);
  EXPECT_DOUBLE_EQ(s.p95, 0.95);
  EXPECT_EQ(s.count, 100u);
  EXPECT_THROW(spl_summary(std::vector<TimingRecord>{}), InvalidArgument);
}

TEST(CostBreakeven, Examples) {
  EXPECT_EQ(cost_breakeven(282, 0.82, 2), 172);
  EXPECT_EQ(cost_breakeven(1.64, 0.82, 2), 1);
  EXPECT_EQ(cost_breakeven(273.88, 0.82, 2), 167);
  EXPECT_EQ(cost_breakeven(10, 3, 1), 4);
  EXPECT_THROW(cost_breakeven(0, 1, 1), InvalidArgument);
  EXPECT_THROW(cost_breakeven(1, -1, 1), InvalidArgument);
}

TEST(CostBreakeven, MonotoneInPrice) {
  Gen g(3);
  for (int i = 0; i < 500; ++i) {
    const double setup = g.uniform(1, 1000), n = g.integer(1, 5);
    const double p1 = g.uniform(0.01, 5), p2 = p1 + g.uniform(0, 5);
    EXPECT_GE(cost_breakeven(setup, p1, n), cost_breakeven(setup, p2, n));
  }
}

std::vector<LabeledItem> synth_items(SceneKind kind, int n, bool extracted) {
  std::vector<LabeledItem> items;
  for (int i = 0; i < n; ++i) {
    const SceneSpec s = make_scene(kind, 200, 150, 500 + static_cast<std::uint64_t>(i));
    LabelSet labels = extracted ? extract_labels(render_uv(s, s.reference_exposure), companion_profile(s))
                                : ground_truth(s);
    items.push_back({"s" + std::to_string(i), std::move(labels), std::nullopt});
  }
  return items;
}

TEST(CompareLabelers, SelfComparisonIsPerfect) {
  const auto items = synth_items(SceneKind::kMixed, 3, false);
  const std::vector<int> classes = {kCableClass, kNeedleClass};
  const EvalReport r = compare_labelers(items, items, classes);
  EXPECT_EQ(r.mean_iou, 1.0);
  EXPECT_EQ(r.pixel_precision, 1.0);
  EXPECT_EQ(r.keypoint_recall, 1.0);
  EXPECT_EQ(r.sample_count, 3u);
  EXPECT_FALSE(r.spl.has_value());
}

TEST(CompareLabelers, MisalignedIdsThrow) {
  auto a = synth_items(SceneKind::kNeedle, 2, false);
  auto b = a;
  b[1].id = "other";
  const std::vector<int> classes = {kNeedleClass};
  EXPECT_THROW(compare_labelers(a, b, classes), InvalidArgument);
  b.pop_back();
  EXPECT_THROW(compare_labelers(a, b, classes), InvalidArgument);
}

TEST(CompareLabelers, ExtractedLabelsAgreeWithGroundTruth) {
  const auto luv = synth_items(SceneKind::kMixed, 8, true);
  const auto truth = synth_items(SceneKind::kMixed, 8, false);
  const std::vector<int> classes = {kCableClass, kNeedleClass};
  const EvalReport r = compare_labelers(luv, truth, classes, 1.0);
  EXPECT_GE(r.mean_iou, 0.95);
  // Cables and needles drawn over a towel corner shift or hide its patch.
  EXPECT_GE(r.keypoint_recall, 0.8);
  EXPECT_LE(r.keypoint_mean_distance, 1.0);
}

TEST(CompareLabelers, OnePixelShiftHurtsThinStructures) {
  auto shifted = [](const Mask& m) {
    Mask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 1; x < m.width(); ++x) out(x, y) = m(x - 1, y);
    }
    return out;
  };
  const auto truth = synth_items(SceneKind::kNeedle, 5, false);
  auto moved = truth;
  for (auto& it : moved) it.labels.mask = shifted(it.labels.mask);
  const std::vector<int> classes = {kNeedleClass};
  EXPECT_LT(compare_labelers(moved, truth, classes).mean_iou, 0.8);

  // A compact disk of radius 30 barely notices the same shift.
  Mask disk(100, 100);
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 100; ++x) disk(x, y) = (x - 50) * (x - 50) + (y - 50) * (y - 50) <= 900;
  }
  EXPECT_GT(class_iou(shifted(disk), disk, 1), 0.95);
}

TEST(EvalReport, JsonAndTable) {
  EvalReport r;
  r.per_class_iou = {{2, 0.5}};
  r.mean_iou = 0.5;
  r.spl = SplSummary{0.2, 0.2, 0.3, 4};
  const auto j = to_json(r);
  EXPECT_EQ(j["per_class_iou"]["2"], 0.5);
  EXPECT_EQ(j["spl"]["count"], 4);
  const std::vector<TableRow> rows = {{"Cable", 0.683, 5.0, 0.221}, {"Towel", std::nullopt, 3.2, 0.125}};
  const std::string t = format_table(rows, "human");
  EXPECT_NE(t.find("SPL (human)"), std::string::npos);
  EXPECT_NE(t.find("0.683"), std::string::npos);
  EXPECT_NE(t.find("N/A"), std::string::npos);
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 3);
}

}  // namespace
}  // namespace luv
