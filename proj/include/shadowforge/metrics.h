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

#ifndef SHADOWFORGE_METRICS_H_
#define SHADOWFORGE_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shadowforge {

struct PredictionRecord {
  std::string item_id;
  std::string true_label;
  std::string predicted_label;
  // Extra CSV columns, e.g. angle_deg -> "-45", shadow_attr -> "alpha08".
  std::map<std::string, std::string> condition;

  bool correct() const { return predicted_label == true_label; }
  std::optional<std::string> tag(std::string_view key) const;
};

// Exact correct/total counts; the ratio is only formed on request.
struct Tally {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;

  void add(bool is_correct) {
    correct += is_correct ? 1 : 0;
    total += 1;
  }
  Tally& operator+=(const Tally& other) {
    correct += other.correct;
    total += other.total;
    return *this;
  }
  double accuracy() const {
    return static_cast<double>(correct) / static_cast<double>(total);
  }

  friend bool operator==(const Tally&, const Tally&) = default;
};

struct AccuracyReport {
  std::string key;
  Tally overall;
  std::map<std::string, Tally> by_group;
};

// Fraction of records whose predicted label equals the true label
// (byte-exact comparison). Throws std::invalid_argument on an empty list.
double top1_accuracy(std::span<const PredictionRecord> records);
Tally tally(std::span<const PredictionRecord> records);

// Partitions by a condition tag, or by true label when key == "class".
// Throws std::invalid_argument naming the item_ids that lack the key.
AccuracyReport grouped_accuracy(std::span<const PredictionRecord> records,
                                std::string_view key);

// 100 * (variant - baseline) / baseline. Throws std::invalid_argument when
// baseline <= 0.
double percent_change(double baseline, double variant);

// Signed percentage with one decimal, or two decimals when the magnitude is
// nonzero and below one ("+8.2%", "+0.31%", "+0.0%").
std::string format_percent_change(double percent);

// Rounds half away from zero to `decimals` places.
double round_decimal(double value, int decimals);

// Header: item_id,true_label,predicted_label, then any extra columns, which
// become condition tags. Fields may be double-quoted. Throws InputError with
// the 1-based line number of the offending row. An angle_deg column must hold
// multiples of 5 in [-90, 90].
std::vector<PredictionRecord> read_predictions_csv(std::istream& in);
std::vector<PredictionRecord> read_predictions_csv(
    const std::filesystem::path& path);

}  // namespace shadowforge

#endif  // SHADOWFORGE_METRICS_H_
