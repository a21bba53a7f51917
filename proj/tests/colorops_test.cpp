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

#include <cmath>

#include "luv/colorops.hpp"
#include "test_support.hpp"

namespace luv {
namespace {

using testing::Gen;

// Independent scalar conversion in the style of Python's colorsys, in double.
Hsv<double> colorsys_hsv(double r, double g, double b) {
  const double maxc = std::max({r, g, b});
  const double minc = std::min({r, g, b});
  if (minc == maxc) return {0.0, 0.0, maxc};
  const double s = (maxc - minc) / maxc;
  const double rc = (maxc - r) / (maxc - minc);
  const double gc = (maxc - g) / (maxc - minc);
  const double bc = (maxc - b) / (maxc - minc);
  double h;
  if (r == maxc) {
    h = bc - gc;
  } else if (g == maxc) {
    h = 2.0 + rc - bc;
  } else {
    h = 4.0 + gc - rc;
  }
  h = std::fmod(h / 6.0, 1.0);
  if (h < 0) h += 1.0;
  return {h * 360.0, s, maxc};
}

TEST(RgbToHsv, NamedColors) {
  EXPECT_EQ(rgb_to_hsv(1.0, 0.0, 0.0), (Hsv<double>{0.0, 1.0, 1.0}));
  EXPECT_EQ(rgb_to_hsv(0.5, 0.5, 0.5), (Hsv<double>{0.0, 0.0, 0.5}));
  EXPECT_EQ(rgb_to_hsv(0.0, 1.0, 1.0), (Hsv<double>{180.0, 1.0, 1.0}));
  EXPECT_EQ(rgb_to_hsv(0.0, 0.0, 0.0), (Hsv<double>{0.0, 0.0, 0.0}));
}

TEST(RgbToHsv, MatchesIndependentFormula) {
  Gen g(11);
  for (int i = 0; i < 5000; ++i) {
    const double r = g.byte() / 255.0, gg = g.byte() / 255.0, b = g.byte() / 255.0;
    const auto a = rgb_to_hsv(r, gg, b);
    const auto o = colorsys_hsv(r, gg, b);
    const double dh = std::abs(a.h - o.h);
    EXPECT_LT(std::min(dh, 360.0 - dh), 1e-9);
    EXPECT_NEAR(a.s, o.s, 1e-12);
    EXPECT_NEAR(a.v, o.v, 1e-12);
  }
}

TEST(RgbToHsv, InverseRoundTripWithinOneLevel) {
  Gen g(12);
  for (int i = 0; i < 5000; ++i) {
    const double r = g.byte() / 255.0, gg = g.byte() / 255.0, b = g.byte() / 255.0;
    const auto hsv = rgb_to_hsv(r, gg, b);
    if (hsv.s <= 0.0) continue;
    ASSERT_GE(hsv.h, 0.0);
    ASSERT_LT(hsv.h, 360.0);
    const auto back = hsv_to_rgb(hsv.h, hsv.s, hsv.v);
    EXPECT_NEAR(back[0], r, 1.0 / 255.0);
    EXPECT_NEAR(back[1], gg, 1.0 / 255.0);
    EXPECT_NEAR(back[2], b, 1.0 / 255.0);
  }
}

TEST(InBand, Wraparound) {
  const HSVBand band(350, 10, 0, 1, 0, 1);
  EXPECT_TRUE(in_band(5.0, 0.5, 0.5, band));
  EXPECT_TRUE(in_band(355.0, 0.5, 0.5, band));
  EXPECT_FALSE(in_band(180.0, 0.5, 0.5, band));
}

TEST(InBand, ClosedIntervalsAndDegenerateHue) {
  const HSVBand band(120, 120, 0.25, 0.75, 0.1, 0.9);
  EXPECT_TRUE(in_band(120.0, 0.25, 0.9, band));
  EXPECT_TRUE(in_band(120.0, 0.75, 0.1, band));
  EXPECT_FALSE(in_band(120.5, 0.5, 0.5, band));
  EXPECT_FALSE(in_band(120.0, 0.76, 0.5, band));
  EXPECT_FALSE(in_band(120.0, 0.5, 0.05, band));
}

TEST(InBand, FullBandAcceptsEverything) {
  Gen g(13);
  const HSVBand full = HSVBand::full();
  for (int i = 0; i < 2000; ++i) {
    EXPECT_TRUE(in_band(rgb_to_hsv(g.uniform(), g.uniform(), g.uniform()), full));
  }
}

TEST(InBand, WrappedBandEqualsUnionOfHalves) {
  Gen g(14);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = g.uniform(180, 360), b = g.uniform(0, 180);
    const HSVBand wrapped(a, b, 0.2, 0.9, 0.1, 1.0);
    const HSVBand upper(a, 360, 0.2, 0.9, 0.1, 1.0);
    const HSVBand lower(0, b, 0.2, 0.9, 0.1, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double h = g.uniform(0, 360), s = g.uniform(), v = g.uniform();
      EXPECT_EQ(in_band(h, s, v, wrapped), in_band(h, s, v, upper) || in_band(h, s, v, lower));
    }
  }
}

TEST(ImageToHsv, SinglePixelAndBlack) {
  ImageRGB red(1, 1);
  red.set(0, 0, {255, 0, 0});
  const auto p = image_to_hsv(red)(0, 0);
  EXPECT_EQ(p, (Hsv<float>{0.0f, 1.0f, 1.0f}));
  const auto black = image_to_hsv(ImageRGB(3, 2));
  EXPECT_EQ(black.width(), 3);
  EXPECT_EQ(black.height(), 2);
  for (const auto& q : black.data()) EXPECT_EQ(q, (Hsv<float>{}));
}

TEST(ImageToHsv, MatchesScalarConversionElementwise) {
  Gen g(15);
  const ImageRGB img = g.image(32, 32);
  const HsvPlane hsv = image_to_hsv(img);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      const Rgb8 c = img.at(x, y);
      const auto ref = rgb_to_hsv(c.r * (1.0f / 255.0f), c.g * (1.0f / 255.0f), c.b * (1.0f / 255.0f));
      EXPECT_EQ(hsv(x, y), ref);
    }
  }
}

TEST(ImageToHsv, InBandCountMatchesBruteForce) {
  Gen g(16);
  const ImageRGB img = g.image(64, 64);
  for (int trial = 0; trial < 20; ++trial) {
    const HSVBand band(g.uniform(0, 360) + 0.37, g.uniform(0, 359) + 0.41, g.uniform(0, 0.5) + 0.0013,
                       g.uniform(0.5, 1) - 0.0017, g.uniform(0, 0.5) + 0.0019, g.uniform(0.5, 1) - 0.0023);
    const HsvPlane hsv = image_to_hsv(img);
    int fast = 0;
    for (const auto& p : hsv.data()) fast += in_band(p, band);
    int brute = 0;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const auto o = colorsys_hsv(img.normalized(x, y, 0), img.normalized(x, y, 1), img.normalized(x, y, 2));
        const bool hue_ok = band.hue_min <= band.hue_max ? (o.h >= band.hue_min && o.h <= band.hue_max)
                                                         : (o.h >= band.hue_min || o.h <= band.hue_max);
        brute += hue_ok && o.s >= band.sat_min && o.s <= band.sat_max && o.v >= band.val_min && o.v <= band.val_max;
      }
    }
    EXPECT_EQ(fast, brute) << "trial " << trial;
  }
}

}  // namespace
}  // namespace luv
