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

#include "shadowforge/breakdown.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "csv.h"
#include "shadowforge/errors.h"

namespace shadowforge {
namespace {

// Accuracies are ratios of counts or values read from text; differences
// within this tolerance are treated as exact ties.
constexpr double kTieTolerance = 1e-9;

bool below_floor(double accuracy, double floor) {
  return accuracy < floor - kTieTolerance;
}

bool sharp_drop(double inner, double outer, double threshold) {
  return inner - outer > threshold + kTieTolerance;
}

// Walks from 0 towards +-90; returns the first triggering angle.
std::optional<int> scan_side(const AccuracyCurve& curve,
                             const BreakdownConfig& config, int direction) {
  for (int step = 1; step <= kPoseMaxDeg / kPoseStepDeg; ++step) {
    const int angle = direction * step * kPoseStepDeg;
    const double here = curve.at_angle(angle);
    const double inner = curve.at_angle(angle - direction * kPoseStepDeg);
    if (below_floor(here, config.accuracy_floor) ||
        sharp_drop(inner, here, config.drop_threshold)) {
      return angle;
    }
  }
  return std::nullopt;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

AccuracyCurve::AccuracyCurve(const std::array<double, kPoseSamples>& accuracies)
    : accuracies_(accuracies) {
  for (int i = 0; i < kPoseSamples; ++i) {
    const double a = accuracies_[i];
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("accuracy at " + std::to_string(angle_at(i)) +
                                  " deg is outside [0, 1]");
    }
  }
}

AccuracyCurve AccuracyCurve::mirrored() const {
  std::array<double, kPoseSamples> flipped;
  for (int i = 0; i < kPoseSamples; ++i) {
    flipped[i] = accuracies_[kPoseSamples - 1 - i];
  }
  return AccuracyCurve(flipped);
}

void BreakdownConfig::validate() const {
  if (!(accuracy_floor > 0.0 && accuracy_floor < 1.0)) {
    throw std::invalid_argument("accuracy floor must be in (0, 1)");
  }
  if (!(drop_threshold > 0.0 && drop_threshold < 1.0)) {
    throw std::invalid_argument("drop threshold must be in (0, 1)");
  }
}

AccuracyCurve curve_from_predictions(std::span<const PredictionRecord> records) {
  std::map<int, Tally> by_angle;
  std::vector<std::string> problems;
  for (const PredictionRecord& r : records) {
    const auto tag = r.tag("angle_deg");
    if (!tag) {
      problems.push_back("record '" + r.item_id + "' has no angle_deg");
      continue;
    }
    int angle = 0;
    const char* first = tag->data() + (tag->starts_with('+') ? 1 : 0);
    const char* last = tag->data() + tag->size();
    const auto [ptr, ec] = std::from_chars(first, last, angle);
    if (ec != std::errc() || ptr != last || angle < kPoseMinDeg ||
        angle > kPoseMaxDeg || angle % kPoseStepDeg != 0) {
      problems.push_back("record '" + r.item_id + "' has off-grid angle " + *tag);
      continue;
    }
    by_angle[angle].add(r.correct());
  }
  std::string missing;
  std::array<double, kPoseSamples> accuracies{};
  for (int i = 0; i < kPoseSamples; ++i) {
    const int angle = AccuracyCurve::angle_at(i);
    auto it = by_angle.find(angle);
    if (it == by_angle.end()) {
      missing += (missing.empty() ? "" : ", ") + std::to_string(angle);
      continue;
    }
    accuracies[i] = it->second.accuracy();
  }
  if (!missing.empty()) problems.push_back("missing angles: " + missing);
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw std::invalid_argument(msg);
  }
  return AccuracyCurve(accuracies);
}

BreakdownResult detect_breakdown(const AccuracyCurve& curve,
                                 const BreakdownConfig& config) {
  config.validate();
  BreakdownResult result;
  if (below_floor(curve.at_angle(0), config.accuracy_floor)) {
    return {0, 0, true, true};
  }
  if (auto angle = scan_side(curve, config, +1)) {
    result.positive = *angle;
    result.positive_triggered = true;
  }
  if (auto angle = scan_side(curve, config, -1)) {
    result.negative = *angle;
    result.negative_triggered = true;
  }
  return result;
}

BreakdownAverage average_breakdowns(std::span<const BreakdownResult> results) {
  if (results.empty()) {
    throw std::invalid_argument("cannot average zero breakdown results");
  }
  double pos = 0.0;
  double neg = 0.0;
  for (const BreakdownResult& r : results) {
    pos += r.positive;
    neg += r.negative;
  }
  const auto n = static_cast<double>(results.size());
  return {pos / n, neg / n};
}

std::string format_degrees(double degrees) {
  return fixed(round_decimal(degrees, 2), 2) + "°";
}

nlohmann::json breakdown_to_json(const BreakdownResult& result) {
  return {{"positive", result.positive},
          {"negative", result.negative},
          {"positive_triggered", result.positive_triggered},
          {"negative_triggered", result.negative_triggered}};
}

AccuracyCurve read_curve_csv(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  const auto rows = internal::parse_csv(text);
  if (rows.empty() || rows[0].fields.size() != 2 ||
      rows[0].fields[0] != "angle_deg" || rows[0].fields[1] != "accuracy") {
    throw InputError("line 1: curve header must be angle_deg,accuracy");
  }
  std::array<double, kPoseSamples> accuracies{};
  std::array<bool, kPoseSamples> present{};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "line " + std::to_string(row.line);
    if (row.fields.size() != 2) throw InputError(where + ": expected 2 fields");
    int angle = 0;
    const std::string& a = row.fields[0];
    const auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), angle);
    if (ec != std::errc() || ptr != a.data() + a.size() || angle < kPoseMinDeg ||
        angle > kPoseMaxDeg || angle % kPoseStepDeg != 0) {
      throw InputError(where + ": off-grid angle '" + a + "'");
    }
    const int index = AccuracyCurve::index_of(angle);
    if (present[index]) throw InputError(where + ": duplicate angle " + a);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(row.fields[1], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != row.fields[1].size() || !(value >= 0.0 && value <= 1.0)) {
      throw InputError(where + ": accuracy '" + row.fields[1] +
                       "' is not a number in [0, 1]");
    }
    accuracies[index] = value;
    present[index] = true;
  }
  std::string missing;
  for (int i = 0; i < kPoseSamples; ++i) {
    if (!present[i]) {
      missing += (missing.empty() ? "" : ", ") + std::to_string(AccuracyCurve::angle_at(i));
    }
  }
  if (!missing.empty()) throw InputError("missing angles: " + missing);
  return AccuracyCurve(accuracies);
}

std::string curve_to_csv(const AccuracyCurve& curve) {
  std::ostringstream out;
  out << "angle_deg,accuracy\n";
  char buf[64];
  for (int i = 0; i < kPoseSamples; ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", AccuracyCurve::angle_at(i),
                  curve.accuracies()[i]);
    out << buf;
  }
  return out.str();
}

std::string render_breakdown_svg(const AccuracyCurve& curve,
                                 const BreakdownResult& result,
                                 const BreakdownConfig& config) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 60, kRight = 20, kTop = 30, kBottom = 50;
  constexpr double kPlotW = kWidth - kLeft - kRight;
  constexpr double kPlotH = kHeight - kTop - kBottom;
  auto px = [&](double angle) {
    return kLeft + (angle - kPoseMinDeg) / (kPoseMaxDeg - kPoseMinDeg) * kPlotW;
  };
  auto py = [&](double accuracy) { return kTop + (1.0 - accuracy) * kPlotH; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth, 0)
      << "\" height=\"" << fixed(kHeight, 0) << "\" viewBox=\"0 0 "
      << fixed(kWidth, 0) << " " << fixed(kHeight, 0) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double acc = i / 5.0;
    svg << "<line x1=\"" << fixed(kLeft, 2) << "\" y1=\"" << fixed(py(acc), 2)
        << "\" x2=\"" << fixed(kLeft + kPlotW, 2) << "\" y2=\"" << fixed(py(acc), 2)
        << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << fixed(kLeft - 8, 2) << "\" y=\"" << fixed(py(acc) + 4, 2)
        << "\" text-anchor=\"end\">" << fixed(acc, 1) << "</text>\n";
  }
  for (int angle = kPoseMinDeg; angle <= kPoseMaxDeg; angle += 30) {
    svg << "<text x=\"" << fixed(px(angle), 2) << "\" y=\""
        << fixed(kTop + kPlotH + 16, 2) << "\" text-anchor=\"middle\">" << angle
        << "</text>\n";
  }
  svg << "<text x=\"" << fixed(kLeft + kPlotW / 2, 2) << "\" y=\""
      << fixed(kHeight - 10, 2)
      << "\" text-anchor=\"middle\">hand pose (degrees)</text>\n";
  svg << "<text x=\"14\" y=\"" << fixed(kTop + kPlotH / 2, 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << fixed(kTop + kPlotH / 2, 2) << ")\">top-1 accuracy</text>\n";
  svg << "</g>\n";
  svg << "<rect x=\"" << fixed(kLeft, 2) << "\" y=\"" << fixed(kTop, 2)
      << "\" width=\"" << fixed(kPlotW, 2) << "\" height=\"" << fixed(kPlotH, 2)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  svg << "<line class=\"floor\" x1=\"" << fixed(kLeft, 2) << "\" y1=\""
      << fixed(py(config.accuracy_floor), 2) << "\" x2=\"" << fixed(kLeft + kPlotW, 2)
      << "\" y2=\"" << fixed(py(config.accuracy_floor), 2)
      << "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";

  svg << "<polyline class=\"curve\" fill=\"none\" stroke=\"#1f77b4\" "
         "stroke-width=\"2\" points=\"";
  for (int i = 0; i < kPoseSamples; ++i) {
    if (i) svg << ' ';
    svg << fixed(px(AccuracyCurve::angle_at(i)), 2) << ','
        << fixed(py(curve.accuracies()[i]), 2);
  }
  svg << "\"/>\n";

  auto marker = [&](int angle, bool triggered) {
    if (!triggered) return;
    svg << "<line class=\"breakdown\" x1=\"" << fixed(px(angle), 2) << "\" y1=\""
        << fixed(kTop, 2) << "\" x2=\"" << fixed(px(angle), 2) << "\" y2=\""
        << fixed(kTop + kPlotH, 2) << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << fixed(px(angle) + 3, 2) << "\" y=\"" << fixed(kTop + 12, 2)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">"
        << angle << "&#176;</text>\n";
  };
  if (result.positive_triggered && result.negative_triggered &&
      result.positive == result.negative) {
    marker(result.positive, true);
  } else {
    marker(result.negative, result.negative_triggered);
    marker(result.positive, result.positive_triggered);
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace shadowforge
