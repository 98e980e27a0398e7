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

#include "shadowforge/image.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace shadowforge {
namespace {

std::size_t checked_area(int width, int height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("image dimensions must be positive, got " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, Rgb fill)
    : width_(width), height_(height), pixels_(checked_area(width, height), fill) {}

ImageBuffer::ImageBuffer(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != checked_area(width, height)) {
    throw std::invalid_argument("pixel count " + std::to_string(pixels_.size()) +
                                " does not match " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
}

ImageBuffer horizontal_flip(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (int y = 0; y < img.height(); ++y) {
    auto src = img.row(y);
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = src[img.width() - 1 - x];
    }
  }
  return out;
}

std::uint8_t scale_channel(std::uint8_t value, double factor) {
  // std::lround rounds halfway cases away from zero.
  const long scaled = std::lround(static_cast<double>(value) * factor);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0L, 255L));
}

}  // namespace shadowforge
