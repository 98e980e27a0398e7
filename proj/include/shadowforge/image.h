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

#ifndef SHADOWFORGE_IMAGE_H_
#define SHADOWFORGE_IMAGE_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shadowforge {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

struct PixelCoord {
  int x = 0;
  int y = 0;
};

// Owned 8-bit RGB raster stored row-major. Width and height are always >= 1,
// so every buffer addresses at least one pixel.
class ImageBuffer {
 public:
  ImageBuffer(int width, int height, Rgb fill = {});
  // Throws std::invalid_argument unless pixels.size() == width * height.
  ImageBuffer(int width, int height, std::vector<Rgb> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return pixels_.size(); }

  bool contains(PixelCoord p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }

  // Unchecked in release builds; use contains() first for untrusted coords.
  const Rgb& at(PixelCoord p) const { return pixels_[index(p)]; }
  Rgb& at(PixelCoord p) { return pixels_[index(p)]; }
  const Rgb& at(int x, int y) const { return at(PixelCoord{x, y}); }
  Rgb& at(int x, int y) { return at(PixelCoord{x, y}); }

  std::span<const Rgb> pixels() const { return pixels_; }
  std::span<Rgb> pixels() { return pixels_; }
  std::span<const Rgb> row(int y) const {
    return std::span<const Rgb>(pixels_).subspan(
        static_cast<std::size_t>(y) * width_, width_);
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(PixelCoord p) const {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(p.x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

// output(x, y) == input(width - 1 - x, y).
ImageBuffer horizontal_flip(const ImageBuffer& img);

// Scales one 8-bit channel value, rounding half away from zero and clamping
// to [0, 255]. Every darkening operation in the library goes through this.
std::uint8_t scale_channel(std::uint8_t value, double factor);

}  // namespace shadowforge

#endif  // SHADOWFORGE_IMAGE_H_
