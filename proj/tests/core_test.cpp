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

#include "luv/core.hpp"
#include "luv/serialize.hpp"

namespace luv {
namespace {

CalibrationProfile two_class_profile() {
  CalibrationProfile p;
  p.name = "bench";
  ClassSpec red;
  red.class_id = 1;
  red.name = "needle";
  red.band = HSVBand(340, 20, 0.5, 1, 0.3, 1);
  ClassSpec green;
  green.class_id = 2;
  green.name = "cable";
  green.band = HSVBand(100, 140, 0.5, 1, 0.3, 1);
  green.paint_type = PaintType::kDye;
  p.classes = {red, green};
  return p;
}

TEST(Plane, RejectsBadDimensions) {
  EXPECT_THROW(Plane<int>(0, 3), InvalidArgument);
  EXPECT_THROW(Plane<int>(2, 2, std::vector<int>(3)), InvalidArgument);
  EXPECT_THROW(ImageRGB(3, 3, std::vector<std::uint8_t>(26)), InvalidArgument);
}

TEST(Plane, RowMajorIndexing) {
  Plane<int> p(3, 2, std::vector<int>{0, 1, 2, 3, 4, 5});
  EXPECT_EQ(p(2, 0), 2);
  EXPECT_EQ(p(0, 1), 3);
  EXPECT_EQ(p.row(1)[2], 5);
}

TEST(ImageRGB, InterleavedAccess) {
  ImageRGB img(2, 1);
  img.set(1, 0, {10, 20, 255});
  EXPECT_EQ(img.bytes()[3], 10);
  EXPECT_EQ(img.at(1, 0), (Rgb8{10, 20, 255}));
  EXPECT_DOUBLE_EQ(img.normalized(1, 0, 2), 1.0);
}

TEST(ToByte, RoundsAndClamps) {
  EXPECT_EQ(to_byte(-0.2), 0);
  EXPECT_EQ(to_byte(std::nan("")), 0);
  EXPECT_EQ(to_byte(1.7), 255);
  EXPECT_EQ(to_byte(0.5), 128);
  EXPECT_EQ(to_byte(1.0 / 255.0), 1);
}

TEST(HSVBand, Validation) {
  EXPECT_NO_THROW(HSVBand(350, 10, 0, 1, 0, 1));
  EXPECT_THROW(HSVBand(-1, 10, 0, 1, 0, 1), InvalidArgument);
  EXPECT_THROW(HSVBand(0, 361, 0, 1, 0, 1), InvalidArgument);
  EXPECT_THROW(HSVBand(0, 10, 0.6, 0.5, 0, 1), InvalidArgument);
  EXPECT_THROW(HSVBand(0, 10, 0, 1, 0, 1.5), InvalidArgument);
}

TEST(CalibrationProfile, ValidatesClasses) {
  CalibrationProfile p = two_class_profile();
  EXPECT_NO_THROW(p.validate());
  p.classes[1].class_id = 1;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = two_class_profile();
  p.classes.clear();
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = two_class_profile();
  p.classes[0].class_id = 256;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = two_class_profile();
  p.uv_exposure = 5000;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(CalibrationProfile, JsonRoundTrip) {
  CalibrationProfile p = two_class_profile();
  p.uv_bracket = {10, 40, 160};
  p.classes[0].keypoint_mode = true;
  const Json j = p;
  const auto back = parse_json(j.dump()).get<CalibrationProfile>();
  EXPECT_EQ(back, p);
  EXPECT_EQ(j["classes"][1]["paint_type"], "dye");
}

TEST(CalibrationProfile, JsonDefaultsApplied) {
  const Json j = parse_json(R"({"name": "p", "classes": [{"class_id": 3, "band":
      {"hue_min": 0, "hue_max": 30, "sat_min": 0, "sat_max": 1, "val_min": 0, "val_max": 1}}]})");
  const auto p = j.get<CalibrationProfile>();
  EXPECT_EQ(p.classes[0].min_area, 10);
  EXPECT_EQ(p.classes[0].morphology_open_radius, 1);
  EXPECT_EQ(p.settle_delay_ms, 250);
}

TEST(CalibrationProfile, JsonRejectsInvalid) {
  EXPECT_THROW(parse_json("{not json"), InvalidArgument);
  const Json dup = parse_json(R"({"name": "p", "classes": [
      {"class_id": 1, "band": {"hue_min": 0, "hue_max": 30, "sat_min": 0, "sat_max": 1, "val_min": 0, "val_max": 1}},
      {"class_id": 1, "band": {"hue_min": 0, "hue_max": 30, "sat_min": 0, "sat_max": 1, "val_min": 0, "val_max": 1}}]})");
  EXPECT_THROW(dup.get<CalibrationProfile>(), InvalidArgument);
}

TEST(PairedSample, ValidatesShapes) {
  PairedSample s;
  s.sample_id = "a";
  s.std_image = ImageRGB(4, 3);
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.uv_images.push_back({50, ImageRGB(4, 3)});
  EXPECT_NO_THROW(s.validate());
  s.uv_images.push_back({60, ImageRGB(3, 4)});
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.uv_images.pop_back();
  s.labels = LabelSet{Mask(2, 2), {}};
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.labels = LabelSet{Mask(4, 3), {}};
  s.timing.label_seconds = -1;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(ValidateMask, RejectsUnknownClass) {
  const CalibrationProfile p = two_class_profile();
  Mask m(2, 2);
  m(1, 1) = 2;
  EXPECT_NO_THROW(validate_mask(m, p));
  m(0, 0) = 7;
  EXPECT_THROW(validate_mask(m, p), InvalidArgument);
}

TEST(Keypoint, JsonRoundTrip) {
  const std::vector<Keypoint> kps = {{1, 3.25, 4.5, 12}, {2, 0.0, 1e-3, 1}};
  const Json j = kps;
  EXPECT_EQ(j.get<std::vector<Keypoint>>(), kps);
}

}  // namespace
}  // namespace luv
