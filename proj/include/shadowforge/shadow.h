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

#ifndef SHADOWFORGE_SHADOW_H_
#define SHADOWFORGE_SHADOW_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "shadowforge/image.h"

namespace shadowforge {

// Normalized image coordinates: (0, 0) is the top-left corner of the image
// and (1, 1) the bottom-right corner.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// A quadrilateral shadow region. Vertices are clamped into the unit square on
// construction. Self-intersecting (bow-tie) quads are rejected with
// std::invalid_argument; collinear or coincident vertices are allowed and
// yield a zero-area polygon that covers no pixels.
class ShadowPolygon {
 public:
  explicit ShadowPolygon(const std::array<Point2, 4>& vertices);

  const std::array<Point2, 4>& vertices() const { return vertices_; }
  // Shoelace area; positive for clockwise order in image (y-down) space.
  double signed_area() const;
  bool degenerate() const { return signed_area() == 0.0; }

  friend bool operator==(const ShadowPolygon&, const ShadowPolygon&) = default;

 private:
  std::array<Point2, 4> vertices_;
};

// Throws std::invalid_argument unless 0 < shadow_factor <= 1.
class ShadowSpec {
 public:
  ShadowSpec(ShadowPolygon polygon, double shadow_factor);

  const ShadowPolygon& polygon() const { return polygon_; }
  double shadow_factor() const { return shadow_factor_; }

  friend bool operator==(const ShadowSpec&, const ShadowSpec&) = default;

 private:
  ShadowPolygon polygon_;
  double shadow_factor_;
};

// A straight occluder (pole) between the light and the scene, cast as a
// band across the image.
//   alpha        occluder opacity in (0, 1); shadow factor is 1 - alpha
//   width_level  band half-width as a fraction of the image diagonal, (0, 0.5]
//   rotation_deg band axis measured from the image vertical
//   translation  offset of the band center from the image center, as a
//                fraction of half the image width, [-1, 1]
struct PoleShadowModel {
  double alpha = 0.5;
  double width_level = 0.10;
  double rotation_deg = 0.0;
  double translation = 0.0;

  // Throws std::invalid_argument when any field is out of range.
  void validate() const;
  double shadow_factor() const { return 1.0 - alpha; }

  friend bool operator==(const PoleShadowModel&,
                         const PoleShadowModel&) = default;
};

// Named levels of the synthetic occluder sweep.
inline constexpr std::array<double, 4> kPoleAlphaLevels = {0.2, 0.4, 0.6, 0.8};
inline constexpr std::array<double, 3> kPoleWidthLevels = {0.05, 0.10, 0.15};

class RegionMask {
 public:
  RegionMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool contains(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool inside) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = inside ? 1 : 0;
  }
  std::size_t count() const;

  friend bool operator==(const RegionMask&, const RegionMask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

// Scanline fill. A pixel is inside when its center
// ((x + 0.5) / width, (y + 0.5) / height) is inside the polygon under the
// even-odd rule; centers lying exactly on an edge count as inside.
// Zero-area polygons produce an empty mask.
RegionMask rasterize_polygon(const ShadowPolygon& polygon, int width,
                             int height);

// Multiplies every channel of the pixels inside the region by `factor`.
ImageBuffer darken_region(const ImageBuffer& img, const RegionMask& mask,
                          double factor);

ImageBuffer apply_shadow(const ImageBuffer& img, const ShadowSpec& spec);

// The four frozen placements used by the default shadow policy:
// left band, bottom band, upper diagonal, lower diagonal.
const std::array<ShadowPolygon, 4>& preset_polygons();

// The pole casts the band {p : |distance(p, center line)| <= width_level * sqrt(2)}
// whose center line passes through (0.5 + 0.5 * translation, 0.5) at
// rotation_deg from the vertical. The returned polygon is the band clipped to
// the unit square; when that clip has five or six corners, the four spanning
// the largest area are kept. Shadow factor is 1 - alpha.
ShadowSpec pole_to_polygon(const PoleShadowModel& model);

ImageBuffer apply_pole_shadow(const ImageBuffer& img,
                              const PoleShadowModel& model);

}  // namespace shadowforge

#endif  // SHADOWFORGE_SHADOW_H_
