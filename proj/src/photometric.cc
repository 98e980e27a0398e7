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

#include "shadowforge/photometric.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace shadowforge {

BrightnessJitterRange::BrightnessJitterRange(double low, double high)
    : low_(low), high_(high) {
  if (!(low > 0.0 && low <= high && high <= 1.0)) {
    throw std::invalid_argument("brightness jitter range must satisfy "
                                "0 < low <= high <= 1, got [" +
                                std::to_string(low) + ", " +
                                std::to_string(high) + "]");
  }
}

double BrightnessJitterRange::factor_for(double draw) const {
  if (!(draw >= 0.0 && draw < 1.0)) {
    throw std::invalid_argument("jitter draw must be in [0, 1)");
  }
  if (low_ == high_) return low_;
  return std::min(high_, low_ + draw * (high_ - low_));
}

ImageBuffer reduce_brightness(const ImageBuffer& img, double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) {
    throw std::invalid_argument("brightness factor must be in (0, 1], got " +
                                std::to_string(factor));
  }
  ImageBuffer out = img;
  for (Rgb& p : out.pixels()) {
    p = {scale_channel(p.r, factor), scale_channel(p.g, factor),
         scale_channel(p.b, factor)};
  }
  return out;
}

ImageBuffer jitter_brightness(const ImageBuffer& img,
                              const BrightnessJitterRange& range, double draw) {
  return reduce_brightness(img, range.factor_for(draw));
}

}  // namespace shadowforge
