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

#include "shadowforge/metrics.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <stdexcept>

#include "csv.h"
#include "shadowforge/errors.h"

namespace shadowforge {
namespace {

using internal::CsvRow;
using internal::parse_csv;

bool valid_pose_angle(std::string_view text) {
  int value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && value >= -90 && value <= 90 &&
         value % 5 == 0;
}

}  // namespace

std::optional<std::string> PredictionRecord::tag(std::string_view key) const {
  auto it = condition.find(std::string(key));
  if (it == condition.end()) return std::nullopt;
  return it->second;
}

Tally tally(std::span<const PredictionRecord> records) {
  Tally t;
  for (const PredictionRecord& r : records) t.add(r.correct());
  return t;
}

double top1_accuracy(std::span<const PredictionRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("top-1 accuracy is undefined for zero records");
  }
  return tally(records).accuracy();
}

AccuracyReport grouped_accuracy(std::span<const PredictionRecord> records,
                                std::string_view key) {
  if (records.empty()) {
    throw std::invalid_argument("grouped accuracy is undefined for zero records");
  }
  AccuracyReport report;
  report.key = std::string(key);
  std::vector<std::string> missing;
  for (const PredictionRecord& r : records) {
    std::optional<std::string> group;
    if (key == "class") {
      group = r.true_label;
    } else {
      group = r.tag(key);
    }
    if (!group) {
      missing.push_back(r.item_id);
      continue;
    }
    report.by_group[*group].add(r.correct());
    report.overall.add(r.correct());
  }
  if (!missing.empty()) {
    std::string msg = "records missing '" + std::string(key) + "':";
    for (const auto& id : missing) msg += " " + id;
    throw std::invalid_argument(msg);
  }
  return report;
}

double percent_change(double baseline, double variant) {
  if (!(baseline > 0.0)) {
    throw std::invalid_argument("percent change needs a positive baseline");
  }
  return 100.0 * (variant - baseline) / baseline;
}

double round_decimal(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

std::string format_percent_change(double percent) {
  const int decimals = (percent != 0.0 && std::fabs(percent) < 1.0) ? 2 : 1;
  double rounded = round_decimal(percent, decimals);
  if (rounded == 0.0) rounded = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.*f%%", decimals, rounded);
  return buf;
}

std::vector<PredictionRecord> read_predictions_csv(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  const std::vector<CsvRow> rows = parse_csv(text);
  if (rows.empty()) throw InputError("line 1: missing CSV header");

  const auto& header = rows.front().fields;
  int id_col = -1, true_col = -1, pred_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "item_id") id_col = static_cast<int>(i);
    else if (header[i] == "true_label") true_col = static_cast<int>(i);
    else if (header[i] == "predicted_label") pred_col = static_cast<int>(i);
  }
  if (id_col < 0 || true_col < 0 || pred_col < 0) {
    throw InputError(
        "line 1: header must contain item_id, true_label and predicted_label");
  }

  std::vector<PredictionRecord> records;
  std::set<std::string> seen;
  std::vector<std::string> errors;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    const std::string where = "line " + std::to_string(row.line);
    if (row.fields.size() != header.size()) {
      errors.push_back(where + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(row.fields.size()));
      continue;
    }
    PredictionRecord rec;
    rec.item_id = row.fields[id_col];
    rec.true_label = row.fields[true_col];
    rec.predicted_label = row.fields[pred_col];
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (static_cast<int>(i) == id_col || static_cast<int>(i) == true_col ||
          static_cast<int>(i) == pred_col || row.fields[i].empty()) {
        continue;
      }
      rec.condition[header[i]] = row.fields[i];
    }
    if (rec.item_id.empty()) {
      errors.push_back(where + ": empty item_id");
      continue;
    }
    if (!seen.insert(rec.item_id).second) {
      errors.push_back(where + ": duplicate item_id '" + rec.item_id + "'");
      continue;
    }
    if (auto angle = rec.tag("angle_deg"); angle && !valid_pose_angle(*angle)) {
      errors.push_back(where + ": angle_deg '" + *angle +
                       "' is not a multiple of 5 in [-90, 90]");
      continue;
    }
    records.push_back(std::move(rec));
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
    throw InputError(msg);
  }
  return records;
}

std::vector<PredictionRecord> read_predictions_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_predictions_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace shadowforge
