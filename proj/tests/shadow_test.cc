// Copyright 2026 The ShadowForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shadowforge/shadow.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>

#include <gtest/gtest.h>

#include "testing/test_support.h"

namespace shadowforge {
namespace {

using testing::mask_bits;
using testing::oracle_mask;

ShadowPolygon unit_square() {
  return ShadowPolygon({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
}

double band_mean_luminance(const ImageBuffer& img, const RegionMask& mask) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!mask.contains(x, y)) continue;
      sum += testing::luminance(img.at(x, y));
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

TEST(ShadowPolygonTest, ClampsIntoUnitSquare) {
  const ShadowPolygon p({{{-0.5, 0.2}, {1.5, 0.2}, {1.0, 2.0}, {0.0, 1.0}}});
  EXPECT_EQ(p.vertices()[0], (Point2{0.0, 0.2}));
  EXPECT_EQ(p.vertices()[1], (Point2{1.0, 0.2}));
  EXPECT_EQ(p.vertices()[2], (Point2{1.0, 1.0}));
}

TEST(ShadowPolygonTest, RejectsBowTie) {
  EXPECT_THROW(ShadowPolygon({{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}),
               std::invalid_argument);
}

TEST(ShadowPolygonTest, RejectsNonFinite) {
  EXPECT_THROW(ShadowPolygon({{{NAN, 0}, {1, 0}, {1, 1}, {0, 1}}}),
               std::invalid_argument);
}

TEST(ShadowPolygonTest, AcceptsDegenerate) {
  const ShadowPolygon line({{{0, 0}, {0.5, 0.5}, {1, 1}, {0.25, 0.25}}});
  EXPECT_TRUE(line.degenerate());
}

TEST(ShadowSpecTest, FactorRange) {
  EXPECT_THROW(ShadowSpec(unit_square(), 0.0), std::invalid_argument);
  EXPECT_THROW(ShadowSpec(unit_square(), 1.01), std::invalid_argument);
  EXPECT_NO_THROW(ShadowSpec(unit_square(), 1.0));
}

TEST(RasterizePolygonTest, UnitSquareCoversEverything) {
  EXPECT_EQ(rasterize_polygon(unit_square(), 4, 4).count(), 16u);
}

TEST(RasterizePolygonTest, LeftHalfCoversTwoColumns) {
  const ShadowPolygon left({{{0, 0}, {0.5, 0}, {0.5, 1}, {0, 1}}});
  const RegionMask mask = rasterize_polygon(left, 4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) EXPECT_EQ(mask.contains(x, y), x < 2) << x << "," << y;
  }
}

TEST(RasterizePolygonTest, CentersOnEdgesCountAsInside) {
  // Pixel centers of a 4-wide raster sit at 0.125, 0.375, 0.625, 0.875.
  const ShadowPolygon band({{{0.375, 0}, {0.625, 0}, {0.625, 1}, {0.375, 1}}});
  const RegionMask mask = rasterize_polygon(band, 4, 1);
  EXPECT_FALSE(mask.contains(0, 0));
  EXPECT_TRUE(mask.contains(1, 0));
  EXPECT_TRUE(mask.contains(2, 0));
  EXPECT_FALSE(mask.contains(3, 0));
}

TEST(RasterizePolygonTest, DegeneratePolygonGivesEmptyMask) {
  const ShadowPolygon line({{{0, 0.5}, {1, 0.5}, {1, 0.5}, {0, 0.5}}});
  EXPECT_EQ(rasterize_polygon(line, 8, 8).count(), 0u);
}

TEST(RasterizePolygonTest, MatchesBruteForceOracleOnRandomQuads) {
  std::mt19937_64 rng(20240501);
  for (int trial = 0; trial < 100; ++trial) {
    const auto quad = testing::random_simple_quad(rng);
    const ShadowPolygon polygon(quad);
    ASSERT_EQ(mask_bits(rasterize_polygon(polygon, 64, 64)),
              oracle_mask(polygon.vertices(), 64, 64))
        << "trial " << trial;
  }
}

TEST(RasterizePolygonTest, MatchesOracleWhenCentersLieOnEdges) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int size = 4 << (trial % 5);
    const auto quad = testing::random_lattice_quad(rng, size);
    const ShadowPolygon polygon(quad);
    ASSERT_EQ(mask_bits(rasterize_polygon(polygon, size, size)),
              oracle_mask(polygon.vertices(), size, size))
        << "trial " << trial << " size " << size << " quad " << quad[0].x << "," << quad[0].y << " " << quad[1].x << "," << quad[1].y << " " << quad[2].x << "," << quad[2].y << " " << quad[3].x << "," << quad[3].y;
  }
}

TEST(RasterizePolygonTest, NonSquareRasters) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 1 + trial * 3 % 97;
    const int h = 1 + trial * 7 % 61;
    const ShadowPolygon polygon(testing::random_simple_quad(rng));
    ASSERT_EQ(mask_bits(rasterize_polygon(polygon, w, h)),
              oracle_mask(polygon.vertices(), w, h));
  }
}

TEST(ApplyShadowTest, HalvesPixelInsideRegion) {
  const ImageBuffer img(1, 1, Rgb{200, 100, 50});
  EXPECT_EQ(apply_shadow(img, ShadowSpec(unit_square(), 0.5)).at(0, 0),
            (Rgb{100, 50, 25}));
}

TEST(ApplyShadowTest, RoundsHalfAwayFromZero) {
  const ImageBuffer img(1, 1, Rgb{201, 0, 0});
  EXPECT_EQ(apply_shadow(img, ShadowSpec(unit_square(), 0.5)).at(0, 0),
            (Rgb{101, 0, 0}));
}

TEST(ApplyShadowTest, UnitFactorIsIdentity) {
  const ImageBuffer img = testing::random_image(17, 9, 1);
  for (const auto& p : preset_polygons()) {
    EXPECT_EQ(apply_shadow(img, ShadowSpec(p, 1.0)), img);
  }
}

TEST(ApplyShadowTest, LocalityMonotonicityAndSquaring) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> factor(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const ImageBuffer img = testing::random_image(24, 20, 1000 + trial);
    const ShadowPolygon polygon(testing::random_simple_quad(rng));
    double f1 = factor(rng), f2 = factor(rng);
    if (f1 > f2) std::swap(f1, f2);
    const RegionMask mask = rasterize_polygon(polygon, 24, 20);
    const ImageBuffer dark = apply_shadow(img, ShadowSpec(polygon, f1));
    const ImageBuffer light = apply_shadow(img, ShadowSpec(polygon, f2));
    const ImageBuffer twice = apply_shadow(dark, ShadowSpec(polygon, f1));
    const ImageBuffer squared = apply_shadow(img, ShadowSpec(polygon, f1 * f1));
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 24; ++x) {
        if (!mask.contains(x, y)) {
          ASSERT_EQ(dark.at(x, y), img.at(x, y));
          continue;
        }
        ASSERT_LE(dark.at(x, y).r, light.at(x, y).r);
        ASSERT_LE(dark.at(x, y).g, light.at(x, y).g);
        ASSERT_LE(dark.at(x, y).b, light.at(x, y).b);
        ASSERT_LE(std::abs(twice.at(x, y).r - squared.at(x, y).r), 1);
        ASSERT_LE(std::abs(twice.at(x, y).g - squared.at(x, y).g), 1);
        ASSERT_LE(std::abs(twice.at(x, y).b - squared.at(x, y).b), 1);
      }
    }
  }
}

TEST(PresetPolygonsTest, FourSimpleQuads) {
  const auto& presets = preset_polygons();
  ASSERT_EQ(presets.size(), 4u);
  for (const auto& p : presets) {
    EXPECT_TRUE(testing::is_simple_quad(p.vertices()));
    EXPECT_GT(p.signed_area(), 0.0);  // clockwise in y-down space
  }
}

TEST(PresetPolygonsTest, FrozenCoordinates) {
  const auto& p = preset_polygons();
  EXPECT_EQ(p[0].vertices()[1], (Point2{0.45, 0.0}));
  EXPECT_EQ(p[1].vertices()[0], (Point2{0.0, 0.55}));
  EXPECT_EQ(p[2].vertices()[2], (Point2{1.0, 0.35}));
  EXPECT_EQ(p[2].vertices()[3], (Point2{0.0, 0.75}));
  EXPECT_EQ(p[3].vertices()[0], (Point2{0.0, 0.25}));
  EXPECT_EQ(p[3].vertices()[1], (Point2{1.0, 0.65}));
}

TEST(PresetPolygonsTest, LeftBandAreaFraction) {
  for (int size : {20, 37, 64, 100, 256}) {
    const RegionMask mask = rasterize_polygon(preset_polygons()[0], size, size);
    const double fraction = static_cast<double>(mask.count()) / (size * size);
    EXPECT_NEAR(fraction, 0.45, 1.0 / size) << size;
  }
}

TEST(PresetPolygonsTest, DiagonalsHaveSlantedEdges) {
  for (int i : {2, 3}) {
    const auto& v = preset_polygons()[i].vertices();
    bool slanted = false;
    for (int k = 0; k < 4; ++k) {
      const Point2& a = v[k];
      const Point2& b = v[(k + 1) % 4];
      slanted |= a.x != b.x && a.y != b.y;
    }
    EXPECT_TRUE(slanted) << "P" << i + 1;
  }
}

TEST(PoleShadowModelTest, ValidatesRanges) {
  EXPECT_THROW((PoleShadowModel{0.0, 0.1, 0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((PoleShadowModel{1.0, 0.1, 0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((PoleShadowModel{0.5, 0.0, 0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((PoleShadowModel{0.5, 0.51, 0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((PoleShadowModel{0.5, 0.1, 0, 1.5}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((PoleShadowModel{0.5, 0.5, 33, -1}.validate()));
}

TEST(PoleToPolygonTest, HeavyWideVerticalBand) {
  const ShadowSpec spec = pole_to_polygon({0.8, 0.15, 0.0, 0.0});
  EXPECT_NEAR(spec.shadow_factor(), 0.2, 1e-12);
  const double half = 0.15 * std::numbers::sqrt2;
  auto v = spec.polygon().vertices();
  std::sort(v.begin(), v.end(), [](const Point2& p, const Point2& q) {
    return std::pair(p.x, p.y) < std::pair(q.x, q.y);
  });
  EXPECT_EQ(v[0], (Point2{0.5 - half, 0.0}));
  EXPECT_EQ(v[1], (Point2{0.5 - half, 1.0}));
  EXPECT_EQ(v[2], (Point2{0.5 + half, 0.0}));
  EXPECT_EQ(v[3], (Point2{0.5 + half, 1.0}));
  EXPECT_NEAR(2 * half, 0.424, 1e-3);
}

TEST(PoleToPolygonTest, LightShadowFactor) {
  EXPECT_NEAR(pole_to_polygon({0.2, 0.05, 0.0, 0.0}).shadow_factor(), 0.8, 1e-12);
}

TEST(PoleToPolygonTest, TranslationShiftsBandCenter) {
  const auto& v = pole_to_polygon({0.5, 0.05, 0.0, 0.5}).polygon().vertices();
  const auto [lo, hi] = std::minmax_element(
      v.begin(), v.end(), [](const Point2& p, const Point2& q) { return p.x < q.x; });
  EXPECT_DOUBLE_EQ(0.5 * (lo->x + hi->x), 0.75);
}

TEST(PoleToPolygonTest, QuarterTurnIsTransposeOnSquareRaster) {
  for (double width : kPoleWidthLevels) {
    const RegionMask vertical =
        rasterize_polygon(pole_to_polygon({0.5, width, 0.0, 0.0}).polygon(), 64, 64);
    const RegionMask horizontal =
        rasterize_polygon(pole_to_polygon({0.5, width, 90.0, 0.0}).polygon(), 64, 64);
    ASSERT_GT(vertical.count(), 0u);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        ASSERT_EQ(horizontal.contains(x, y), vertical.contains(y, x));
      }
    }
  }
}

TEST(PoleToPolygonTest, RotatedBandStaysSimpleAndCoversCenterLine) {
  for (double rot = -180.0; rot <= 180.0; rot += 7.5) {
    for (double t : {-1.0, -0.4, 0.0, 0.3, 1.0}) {
      const ShadowSpec spec = pole_to_polygon({0.5, 0.1, rot, t});
      EXPECT_TRUE(testing::is_simple_quad(spec.polygon().vertices()));
      const Point2 center{0.5 + 0.5 * t, 0.5};
      EXPECT_TRUE(testing::oracle_inside(spec.polygon().vertices(), center))
          << rot << " " << t;
    }
  }
}

TEST(PoleToPolygonTest, AreaNonDecreasingInWidth) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> rot(-180.0, 180.0);
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double r = trial < 4 ? 90.0 * trial : rot(rng);
    const double t = shift(rng);
    std::size_t previous = 0;
    for (double w = 0.01; w <= 0.5; w += 0.01) {
      const std::size_t count =
          rasterize_polygon(pole_to_polygon({0.5, w, r, t}).polygon(), 48, 48).count();
      ASSERT_GE(count, previous) << "rotation " << r << " translation " << t
                                 << " width " << w;
      previous = count;
    }
  }
}

TEST(ApplyPoleShadowTest, EqualsTwoStepPipeline) {
  const ImageBuffer img = testing::random_image(40, 30, 8);
  const PoleShadowModel model{0.6, 0.10, 25.0, -0.3};
  EXPECT_EQ(apply_pole_shadow(img, model), apply_shadow(img, pole_to_polygon(model)));
}

TEST(ApplyPoleShadowTest, HigherAlphaDarkerBand) {
  const ImageBuffer img = testing::random_image(64, 64, 12);
  const PoleShadowModel light{0.2, 0.10, 0.0, 0.0};
  const PoleShadowModel heavy{0.8, 0.10, 0.0, 0.0};
  const RegionMask band = rasterize_polygon(pole_to_polygon(light).polygon(), 64, 64);
  EXPECT_LT(band_mean_luminance(apply_pole_shadow(img, heavy), band),
            band_mean_luminance(apply_pole_shadow(img, light), band));
}

TEST(ApplyPoleShadowTest, WiderPoleShadowsMorePixels) {
  const auto count = [](double width) {
    return rasterize_polygon(pole_to_polygon({0.5, width, 0.0, 0.0}).polygon(), 64, 64)
        .count();
  };
  EXPECT_GT(count(0.15), count(0.05));
}

}  // namespace
}  // namespace shadowforge
