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

#ifndef SHADOWFORGE_BREAKDOWN_H_
#define SHADOWFORGE_BREAKDOWN_H_

#include <array>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "shadowforge/metrics.h"

namespace shadowforge {

inline constexpr int kPoseStepDeg = 5;
inline constexpr int kPoseMinDeg = -90;
inline constexpr int kPoseMaxDeg = 90;
inline constexpr int kPoseSamples = (kPoseMaxDeg - kPoseMinDeg) / kPoseStepDeg + 1;

// Top-1 accuracy sampled at every 5 degrees of hand pose from -90 to 90.
class AccuracyCurve {
 public:
  // Throws std::invalid_argument if any accuracy lies outside [0, 1].
  explicit AccuracyCurve(const std::array<double, kPoseSamples>& accuracies);

  static int angle_at(int index) { return kPoseMinDeg + index * kPoseStepDeg; }
  static int index_of(int angle_deg) {
    return (angle_deg - kPoseMinDeg) / kPoseStepDeg;
  }

  double at_angle(int angle_deg) const { return accuracies_[index_of(angle_deg)]; }
  const std::array<double, kPoseSamples>& accuracies() const {
    return accuracies_;
  }

  // a(theta) <-> a(-theta).
  AccuracyCurve mirrored() const;

 private:
  std::array<double, kPoseSamples> accuracies_;
};

struct BreakdownConfig {
  double accuracy_floor = 0.60;
  // Absolute accuracy drop between neighbouring grid angles.
  double drop_threshold = 0.15;

  void validate() const;
};

struct BreakdownResult {
  int positive = kPoseMaxDeg;
  int negative = kPoseMinDeg;
  bool positive_triggered = false;
  bool negative_triggered = false;

  friend bool operator==(const BreakdownResult&,
                         const BreakdownResult&) = default;
};

// Per-angle top-1 accuracy. Throws std::invalid_argument listing absent grid
// angles, off-grid angles, or records without angle_deg.
AccuracyCurve curve_from_predictions(std::span<const PredictionRecord> records);

// Scans outward from 0 degrees on each side; the first angle whose accuracy
// is strictly below the floor, or strictly more than drop_threshold below its
// inner neighbour, is the breakdown point. If a(0) is below the floor both
// sides break down at 0. Comparisons treat differences within 1e-9 as equal.
BreakdownResult detect_breakdown(const AccuracyCurve& curve,
                                 const BreakdownConfig& config = {});

struct BreakdownAverage {
  double positive = 0.0;
  double negative = 0.0;
};

// Unweighted means; throws std::invalid_argument on an empty list.
BreakdownAverage average_breakdowns(std::span<const BreakdownResult> results);

// Two decimals with a degree sign, e.g. "63.41°".
std::string format_degrees(double degrees);

nlohmann::json breakdown_to_json(const BreakdownResult& result);

// Header angle_deg,accuracy followed by the 37 grid rows in any order.
AccuracyCurve read_curve_csv(std::istream& in);
std::string curve_to_csv(const AccuracyCurve& curve);

// Standalone accuracy-vs-angle chart: curve polyline, dashed floor line, and
// vertical markers at triggered breakdown points.
std::string render_breakdown_svg(const AccuracyCurve& curve,
                                 const BreakdownResult& result,
                                 const BreakdownConfig& config);

}  // namespace shadowforge

#endif  // SHADOWFORGE_BREAKDOWN_H_
