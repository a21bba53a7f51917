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
#include <cmath>

#include "luv/fusion.hpp"
#include "test_support.hpp"

namespace luv {
namespace {

using testing::Gen;

double max_abs_diff(const PlaneD& a, const PlaneD& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

PlaneD random_plane(Gen& g, int w, int h) {
  PlaneD p(w, h);
  for (double& v : p.data()) v = g.uniform();
  return p;
}

TEST(WellExposedness, PeaksAtMidGray) {
  EXPECT_DOUBLE_EQ(well_exposedness(0.5), 1.0);
  EXPECT_NEAR(well_exposedness(0.7), std::exp(-0.5), 1e-12);
  EXPECT_DOUBLE_EQ(well_exposedness(0.1), well_exposedness(0.9));
}

TEST(QualityWeights, FlatGrayHitsFloor) {
  ImageRGB img(5, 4);
  for (auto& b : img.bytes()) b = 128;
  const PlaneD weights = quality_weights(img);
  for (double w : weights.data()) EXPECT_DOUBLE_EQ(w, FusionParams{}.weight_floor);
}

TEST(NormalizeWeights, SumsToOne) {
  Gen g(1);
  std::vector<PlaneD> w;
  for (int k = 0; k < 4; ++k) w.push_back(random_plane(g, 7, 5));
  const auto n = normalize_weights(w);
  for (std::size_t i = 0; i < n[0].size(); ++i) {
    double s = 0.0;
    for (const auto& p : n) s += p.data()[i];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(PyramidLevels, Examples) {
  EXPECT_EQ(pyramid_levels(1280, 720), 7);
  EXPECT_EQ(pyramid_levels(64, 64), 4);
  EXPECT_EQ(pyramid_levels(8, 100), 1);
  EXPECT_EQ(pyramid_levels(1, 1), 1);
}

TEST(GaussianPyramid, CeilHalvingShapes) {
  const auto pyr = gaussian_pyramid(PlaneD(37, 20), 4);
  ASSERT_EQ(pyr.size(), 4u);
  EXPECT_TRUE(pyr[1].same_shape(19, 10));
  EXPECT_TRUE(pyr[2].same_shape(10, 5));
  EXPECT_TRUE(pyr[3].same_shape(5, 3));
}

TEST(Blur, PreservesConstant) {
  const PlaneD c(9, 6, 0.42);
  EXPECT_LT(max_abs_diff(detail::blur(c), c), 1e-15);
  EXPECT_LT(max_abs_diff(detail::upsample(PlaneD(3, 2, 0.42), 6, 3), PlaneD(6, 3, 0.42)), 1e-15);
}

TEST(LaplacianPyramid, CollapseRoundTripsRandomPlanes) {
  Gen g(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = g.integer(1, 90), h = g.integer(1, 90);
    const PlaneD base = random_plane(g, w, h);
    const int levels = g.integer(1, 6);
    const auto lap = laplacian_pyramid(base, levels);
    EXPECT_LT(max_abs_diff(collapse_pyramid(lap), base), 1e-6) << w << "x" << h << " levels " << levels;
  }
}

TEST(FuseExposures, IdenticalInputsReturnInput) {
  Gen g(3);
  for (int n : {1, 2, 3, 5}) {
    const ImageRGB img = g.image(48, 33);
    const ColorPlanes planes = ColorPlanes::from_image(img);
    const std::vector<ColorPlanes> copies(static_cast<std::size_t>(n), planes);
    const ColorPlanes fused = fuse_exposures_planes(copies);
    for (int c = 0; c < 3; ++c) EXPECT_LT(max_abs_diff(fused.channel[c], planes.channel[c]), 1e-6);
    const std::vector<ImageRGB> imgs(static_cast<std::size_t>(n), img);
    EXPECT_EQ(fuse_exposures(imgs), img);
  }
}

TEST(FuseExposures, RejectsEmptyAndMismatched) {
  EXPECT_THROW(fuse_exposures(std::vector<ImageRGB>{}), InvalidArgument);
  EXPECT_THROW(fuse_exposures(std::vector<ImageRGB>{ImageRGB(4, 4), ImageRGB(4, 5)}), InvalidArgument);
}

// A bright and a dim patch under a short and a long exposure. Each exposure
// clips one patch (value below 0.02 or above 0.98); fusion should clip fewer.
TEST(FuseExposures, ReducesClippedPixelsOnPatches) {
  const int w = 96, h = 64;
  struct Rad {
    double r, g, b;
  };
  std::vector<Rad> radiance(static_cast<std::size_t>(w * h));
  BinaryMask painted(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = 1.0 + 0.05 * std::sin(0.3 * x) * std::cos(0.2 * y);
      Rad r{0.05 * t, 0.04 * t, 0.03 * t};
      if (y >= 16 && y < 48 && x >= 8 && x < 40) {
        r = {1.0 * t, 0.5 * t, 0.3 * t};
        painted(x, y) = 1;
      } else if (y >= 16 && y < 48 && x >= 56 && x < 88) {
        r = {0.02 * t, 0.01 * t, 0.006 * t};
        painted(x, y) = 1;
      }
      radiance[static_cast<std::size_t>(y * w + x)] = r;
    }
  }
  auto expose = [&](double gain) {
    ImageRGB img(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Rad& r = radiance[static_cast<std::size_t>(y * w + x)];
        img.set(x, y, {to_byte(r.r * gain), to_byte(r.g * gain), to_byte(r.b * gain)});
      }
    }
    return img;
  };
  auto clipped = [&](const ImageRGB& img) {
    int n = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!painted(x, y)) continue;
        const Rgb8 c = img.at(x, y);
        const double v = std::max({c.r, c.g, c.b}) / 255.0;
        n += v < 0.02 || v > 0.98;
      }
    }
    return n;
  };
  const std::vector<ImageRGB> bracket = {expose(0.6), expose(25.0)};
  const int fused = clipped(fuse_exposures(bracket));
  for (const auto& img : bracket) {
    EXPECT_GT(clipped(img), 0);
    EXPECT_LT(fused, clipped(img));
  }
}

}  // namespace
}  // namespace luv
