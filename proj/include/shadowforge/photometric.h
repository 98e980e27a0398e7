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

#ifndef SHADOWFORGE_PHOTOMETRIC_H_
#define SHADOWFORGE_PHOTOMETRIC_H_

#include "shadowforge/image.h"

namespace shadowforge {

// Uniform brightness jitter bounds; 0 < low <= high <= 1.
class BrightnessJitterRange {
 public:
  BrightnessJitterRange(double low, double high);

  double low() const { return low_; }
  double high() const { return high_; }
  // low + draw * (high - low), for a uniform deviate draw in [0, 1).
  double factor_for(double draw) const;

  friend bool operator==(const BrightnessJitterRange&,
                         const BrightnessJitterRange&) = default;

 private:
  double low_;
  double high_;
};

// Global darkening by `factor` in (0, 1].
ImageBuffer reduce_brightness(const ImageBuffer& img, double factor);

ImageBuffer jitter_brightness(const ImageBuffer& img,
                              const BrightnessJitterRange& range, double draw);

}  // namespace shadowforge

#endif  // SHADOWFORGE_PHOTOMETRIC_H_
