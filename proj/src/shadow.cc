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
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace shadowforge {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// True when the open segments cross at a single interior point. Touching and
// collinear overlap are not counted; they only arise for degenerate quads.
bool segments_cross(const Point2& a, const Point2& b, const Point2& c,
                    const Point2& d) {
  const int d1 = sign(cross(a, b, c));
  const int d2 = sign(cross(a, b, d));
  const int d3 = sign(cross(c, d, a));
  const int d4 = sign(cross(c, d, b));
  return d1 * d2 < 0 && d3 * d4 < 0;
}

double clamp_unit(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("polygon vertex ") + what +
                                " is not finite");
  }
  return std::clamp(v, 0.0, 1.0);
}

// Exact for multiples of 90 degrees so axis-aligned bands stay axis-aligned.
void sin_cos_deg(double degrees, double& s, double& c) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0) r += 360.0;
  if (r == 0.0) { s = 0.0; c = 1.0; return; }
  if (r == 90.0) { s = 1.0; c = 0.0; return; }
  if (r == 180.0) { s = 0.0; c = -1.0; return; }
  if (r == 270.0) { s = -1.0; c = 0.0; return; }
  const double rad = r * std::numbers::pi / 180.0;
  s = std::sin(rad);
  c = std::cos(rad);
}

// Marks columns whose centers lie in the closed interval [lo, hi].
void fill_span(RegionMask& mask, int y, double lo, double hi) {
  const int w = mask.width();
  const double scale = static_cast<double>(w);
  int x = std::max(0, static_cast<int>(std::floor(lo * scale - 0.5)) - 1);
  for (; x < w; ++x) {
    const double cx = (x + 0.5) / scale;
    if (cx < lo) continue;
    if (cx > hi) break;
    mask.set(x, y, true);
  }
}


// Keeps the part of a convex polygon where side * (normal . p - offset) >= 0.
// Crossings on axis-aligned edges are solved along the free axis directly so
// axis-aligned bands land on exactly representable coordinates.
std::vector<Point2> clip_half_plane(const std::vector<Point2>& polygon,
                                    const Point2& normal, double offset,
                                    double side) {
  auto distance = [&](const Point2& p) {
    return side * (normal.x * p.x + normal.y * p.y - offset);
  };
  auto crossing = [&](const Point2& a, const Point2& b, double da, double db) {
    if (a.y == b.y && normal.x != 0.0) {
      return Point2{(offset - normal.y * a.y) / normal.x, a.y};
    }
    if (a.x == b.x && normal.y != 0.0) {
      return Point2{a.x, (offset - normal.x * a.x) / normal.y};
    }
    const double t = da / (da - db);
    return Point2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  };
  std::vector<Point2> out;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[(i + 1) % polygon.size()];
    const double da = distance(a);
    const double db = distance(b);
    if (da >= 0.0) out.push_back(a);
    if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
      out.push_back(crossing(a, b, da, db));
    }
  }
  std::vector<Point2> unique;
  for (const Point2& p : out) {
    if (unique.empty() || !(unique.back() == p)) unique.push_back(p);
  }
  while (unique.size() > 1 && unique.front() == unique.back()) unique.pop_back();
  return unique;
}

double quad_area(const std::array<Point2, 4>& q) {
  double twice = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    twice += q[i].x * q[(i + 1) % 4].y - q[(i + 1) % 4].x * q[i].y;
  }
  return std::fabs(0.5 * twice);
}

// Four vertices of a convex polygon. Triangles repeat their last vertex;
// pentagons and hexagons keep the largest-area subset of four vertices (the
// first one found on ties), which preserves containment monotonicity of area.
std::array<Point2, 4> largest_quad(const std::vector<Point2>& polygon) {
  if (polygon.size() < 3) {
    const Point2 p = polygon.empty() ? Point2{} : polygon.front();
    return {p, p, p, p};
  }
  if (polygon.size() == 3) return {polygon[0], polygon[1], polygon[2], polygon[2]};
  if (polygon.size() == 4) return {polygon[0], polygon[1], polygon[2], polygon[3]};
  const std::size_t n = polygon.size();
  std::array<Point2, 4> best{};
  double best_area = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
          const std::array<Point2, 4> q = {polygon[i], polygon[j], polygon[k], polygon[l]};
          const double area = quad_area(q);
          if (area > best_area) {
            best_area = area;
            best = q;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

ShadowPolygon::ShadowPolygon(const std::array<Point2, 4>& vertices) {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    vertices_[i] = {clamp_unit(vertices[i].x, "x"),
                    clamp_unit(vertices[i].y, "y")};
  }
  const auto& v = vertices_;
  if (segments_cross(v[0], v[1], v[2], v[3]) ||
      segments_cross(v[1], v[2], v[3], v[0])) {
    throw std::invalid_argument("shadow polygon is self-intersecting");
  }
}

double ShadowPolygon::signed_area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[(i + 1) % vertices_.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

ShadowSpec::ShadowSpec(ShadowPolygon polygon, double shadow_factor)
    : polygon_(std::move(polygon)), shadow_factor_(shadow_factor) {
  if (!(shadow_factor > 0.0 && shadow_factor <= 1.0)) {
    throw std::invalid_argument("shadow_factor must be in (0, 1], got " +
                                std::to_string(shadow_factor));
  }
}

void PoleShadowModel::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("pole alpha must be in (0, 1), got " +
                                std::to_string(alpha));
  }
  if (!(width_level > 0.0 && width_level <= 0.5)) {
    throw std::invalid_argument("pole width_level must be in (0, 0.5], got " +
                                std::to_string(width_level));
  }
  if (!std::isfinite(rotation_deg)) {
    throw std::invalid_argument("pole rotation_deg must be finite");
  }
  if (!(translation >= -1.0 && translation <= 1.0)) {
    throw std::invalid_argument("pole translation must be in [-1, 1], got " +
                                std::to_string(translation));
  }
}

RegionMask::RegionMask(int width, int height)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("mask dimensions must be positive");
  }
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

RegionMask rasterize_polygon(const ShadowPolygon& polygon, int width,
                             int height) {
  RegionMask mask(width, height);
  if (polygon.degenerate()) return mask;

  const auto& v = polygon.vertices();
  std::vector<double> crossings;
  crossings.reserve(v.size());
  for (int y = 0; y < height; ++y) {
    const double cy = (y + 0.5) / static_cast<double>(height);
    crossings.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point2& a = v[i];
      const Point2& b = v[(i + 1) % v.size()];
      if (cy < std::min(a.y, b.y) || cy > std::max(a.y, b.y)) continue;
      if (a.y == b.y) {
        // Horizontal edge on this scanline: boundary only, no parity change.
        fill_span(mask, y, std::min(a.x, b.x), std::max(a.x, b.x));
        continue;
      }
      const double x = a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y);
      fill_span(mask, y, x, x);
      // Half-open in y so a vertex on the scanline is counted once.
      if ((a.y <= cy) != (b.y <= cy)) crossings.push_back(x);
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
      fill_span(mask, y, crossings[i], crossings[i + 1]);
    }
  }
  return mask;
}

ImageBuffer darken_region(const ImageBuffer& img, const RegionMask& mask,
                          double factor) {
  if (mask.width() != img.width() || mask.height() != img.height()) {
    throw std::invalid_argument("mask dimensions do not match image");
  }
  ImageBuffer out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!mask.contains(x, y)) continue;
      Rgb& p = out.at(x, y);
      p = {scale_channel(p.r, factor), scale_channel(p.g, factor),
           scale_channel(p.b, factor)};
    }
  }
  return out;
}

ImageBuffer apply_shadow(const ImageBuffer& img, const ShadowSpec& spec) {
  if (spec.shadow_factor() == 1.0) return img;
  return darken_region(
      img, rasterize_polygon(spec.polygon(), img.width(), img.height()),
      spec.shadow_factor());
}

const std::array<ShadowPolygon, 4>& preset_polygons() {
  static const std::array<ShadowPolygon, 4> presets = {
      ShadowPolygon({{{0.00, 0.00}, {0.45, 0.00}, {0.45, 1.00}, {0.00, 1.00}}}),
      ShadowPolygon({{{0.00, 0.55}, {1.00, 0.55}, {1.00, 1.00}, {0.00, 1.00}}}),
      ShadowPolygon({{{0.00, 0.00}, {1.00, 0.00}, {1.00, 0.35}, {0.00, 0.75}}}),
      ShadowPolygon({{{0.00, 0.25}, {1.00, 0.65}, {1.00, 1.00}, {0.00, 1.00}}}),
  };
  return presets;
}

ShadowSpec pole_to_polygon(const PoleShadowModel& model) {
  model.validate();
  double s = 0.0;
  double c = 1.0;
  sin_cos_deg(model.rotation_deg, s, c);
  // Unit normal of the band axis (axis = (sin, cos) in y-down image space).
  const Point2 normal{c, -s};
  const Point2 center{0.5 + 0.5 * model.translation, 0.5};
  const double center_offset = normal.x * center.x + normal.y * center.y;
  const double half_width = model.width_level * std::numbers::sqrt2;

  std::vector<Point2> region = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  region = clip_half_plane(region, normal, center_offset - half_width, +1.0);
  region = clip_half_plane(region, normal, center_offset + half_width, -1.0);
  return ShadowSpec(ShadowPolygon(largest_quad(region)), model.shadow_factor());
}

ImageBuffer apply_pole_shadow(const ImageBuffer& img,
                              const PoleShadowModel& model) {
  return apply_shadow(img, pole_to_polygon(model));
}

}  // namespace shadowforge
