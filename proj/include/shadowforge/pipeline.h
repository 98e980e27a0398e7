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

#ifndef SHADOWFORGE_PIPELINE_H_
#define SHADOWFORGE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "shadowforge/image.h"
#include "shadowforge/photometric.h"
#include "shadowforge/shadow.h"

namespace shadowforge {

struct FlipStep {
  double prob = 1.0;
};

// Picks one spec uniformly when the gate fires.
struct ShadowStep {
  double prob = 1.0;
  std::vector<ShadowSpec> specs;
};

struct PoleShadowStep {
  double prob = 1.0;
  std::vector<PoleShadowModel> models;
};

struct BrightnessStep {
  double prob = 1.0;
  double factor = 0.5;
};

struct JitterStep {
  double prob = 1.0;
  BrightnessJitterRange range{0.25, 1.0};
};

using PolicyStep =
    std::variant<FlipStep, ShadowStep, PoleShadowStep, BrightnessStep,
                 JitterStep>;

struct AugmentationPolicy {
  std::vector<PolicyStep> steps;
  std::uint64_t master_seed = 0;

  // Throws std::invalid_argument: empty policy, probability outside [0, 1],
  // empty spec/model list, or an out-of-range parameter.
  void validate() const;
};

// One fired operation and its resolved parameters.
struct AppliedOp {
  std::string op;
  nlohmann::json params = nlohmann::json::object();

  friend bool operator==(const AppliedOp&, const AppliedOp&) = default;
};

struct ManifestEntry {
  std::string relative_path;  // '/'-separated, relative to the dataset root
  std::string class_label;
  std::vector<AppliedOp> applied_ops;
  std::uint64_t image_seed = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::uint64_t master_seed = 0;
  nlohmann::json policy;  // null for manifests produced by scan_dataset
  std::vector<ManifestEntry> entries;
  std::vector<std::string> skipped;

  friend bool operator==(const DatasetManifest&,
                         const DatasetManifest&) = default;
};

struct AugmentResult {
  ImageBuffer image;
  std::vector<AppliedOp> applied_ops;
};

// Lists root/<class>/<file>.{png,jpg,jpeg} (extension match is
// case-insensitive), decoding each file. Undecodable files go to `skipped`.
// Entries are sorted by relative_path. Throws IoError when root cannot be
// read.
DatasetManifest scan_dataset(const std::filesystem::path& root);

// FNV-1a over the path bytes, mixed, xored with master_seed, mixed again.
std::uint64_t derive_image_seed(std::uint64_t master_seed,
                                std::string_view relative_path);

// Deterministic uniform deviates in [0, 1), 53-bit resolution, backed by
// std::mt19937_64 so the stream is identical on every conforming platform.
class DeviateStream {
 public:
  explicit DeviateStream(std::uint64_t seed);
  double next();
  // Uniform index in [0, n); consumes exactly one deviate.
  std::size_t next_index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Runs the policy steps in order. Each step consumes one deviate for its
// gate; a fired shadow/pole step then consumes one for the spec choice and a
// fired jitter step one for the brightness draw.
AugmentResult augment_image(const ImageBuffer& img,
                            const AugmentationPolicy& policy,
                            std::uint64_t image_seed);

struct AugmentDatasetOptions {
  unsigned workers = 1;
};

// Augments every decodable image under root and writes PNGs plus
// manifest.json under out. Output bytes do not depend on worker count.
// Throws IoError naming the failing path; partial output is left behind.
DatasetManifest augment_dataset(const std::filesystem::path& root,
                                const std::filesystem::path& out,
                                const AugmentationPolicy& policy,
                                const AugmentDatasetOptions& options = {});

// Output location for an entry: relative_path itself when it already ends in
// .png, otherwise relative_path + ".png".
std::string output_relative_path(std::string_view relative_path);

// Canonical JSON forms. policy_from_json throws InputError with the JSON
// path of the offending field.
nlohmann::json policy_to_json(const AugmentationPolicy& policy);
AugmentationPolicy policy_from_json(const nlohmann::json& doc);
nlohmann::json shadow_spec_to_json(const ShadowSpec& spec);
ShadowSpec shadow_spec_from_json(const nlohmann::json& doc);
nlohmann::json pole_model_to_json(const PoleShadowModel& model);
PoleShadowModel pole_model_from_json(const nlohmann::json& doc);
nlohmann::json manifest_to_json(const DatasetManifest& manifest);

// Named policies:
//   flip-shadow50     flip(0.5), shadow(0.5, four presets, factor 0.5)
//   brightness50      reduce_brightness(1.0, 0.5)
//   brightness50-p50  reduce_brightness(0.5, 0.5)
//   jitter-025-1      jitter_brightness(1.0, [0.25, 1])
std::vector<std::string> policy_preset_names();
// Throws std::out_of_range for unknown names.
AugmentationPolicy policy_preset(std::string_view name,
                                 std::uint64_t master_seed);

}  // namespace shadowforge

#endif  // SHADOWFORGE_PIPELINE_H_
