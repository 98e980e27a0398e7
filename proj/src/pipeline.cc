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

#include "shadowforge/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "shadowforge/codec.h"
#include "shadowforge/errors.h"

namespace shadowforge {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool has_image_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

void check_prob(double prob, std::size_t index) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("step " + std::to_string(index) +
                                ": probability must be in [0, 1], got " +
                                std::to_string(prob));
  }
}

json vertices_to_json(const ShadowPolygon& polygon) {
  json out = json::array();
  for (const Point2& v : polygon.vertices()) out.push_back({v.x, v.y});
  return out;
}

// Field access with error messages that carry the JSON path.
const json& require(const json& doc, const std::string& key,
                    const std::string& path) {
  if (!doc.is_object()) throw InputError(path + ": expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) throw InputError(path + "." + key + ": missing");
  return *it;
}

double number_at(const json& doc, const std::string& key,
                 const std::string& path) {
  const json& v = require(doc, key, path);
  if (!v.is_number()) throw InputError(path + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& doc, const std::string& key, double fallback,
                 const std::string& path) {
  if (!doc.contains(key)) return fallback;
  return number_at(doc, key, path);
}

template <typename F>
auto rethrow_with_path(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

ShadowSpec shadow_spec_from_json_at(const json& doc, const std::string& path) {
  const json& vertices = require(doc, "vertices", path);
  if (!vertices.is_array() || vertices.size() != 4) {
    throw InputError(path + ".vertices: expected an array of 4 [x, y] pairs");
  }
  std::array<Point2, 4> points;
  for (std::size_t i = 0; i < 4; ++i) {
    const json& v = vertices[i];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw InputError(path + ".vertices[" + std::to_string(i) +
                       "]: expected [x, y] numbers");
    }
    points[i] = {v[0].get<double>(), v[1].get<double>()};
  }
  const double factor = number_at(doc, "shadow_factor", path);
  return rethrow_with_path(
      path, [&] { return ShadowSpec(ShadowPolygon(points), factor); });
}

PoleShadowModel pole_model_from_json_at(const json& doc, const std::string& path) {
  PoleShadowModel model;
  model.alpha = number_at(doc, "alpha", path);
  model.width_level = number_at(doc, "width_level", path);
  model.rotation_deg = number_or(doc, "rotation_deg", 0.0, path);
  model.translation = number_or(doc, "translation", 0.0, path);
  rethrow_with_path(path, [&] {
    model.validate();
    return 0;
  });
  return model;
}

struct Candidate {
  std::string relative_path;
  std::string class_label;
  fs::path absolute;
};

// Image files at depth >= 2 under root, sorted by relative path.
std::vector<Candidate> list_candidates(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IoError("dataset root is not a readable directory: " + root.string());
  }
  std::vector<Candidate> out;
  fs::recursive_directory_iterator it(root, ec);
  if (ec) throw IoError("cannot read " + root.string() + ": " + ec.message());
  for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) throw IoError("cannot read " + root.string() + ": " + ec.message());
    const fs::directory_entry& entry = *it;
    if (!entry.is_regular_file() || !has_image_extension(entry.path())) continue;
    const fs::path rel = entry.path().lexically_relative(root);
    if (!rel.has_parent_path()) continue;  // no class directory
    out.push_back({rel.generic_string(),
                   rel.parent_path().filename().string(), entry.path()});
  }
  if (ec) throw IoError("cannot read " + root.string() + ": " + ec.message());
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.relative_path < b.relative_path;
  });
  return out;
}

std::optional<ImageBuffer> try_decode(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const InputError&) {
    return std::nullopt;
  }
}

// Runs job(i) for i in [0, n) on `workers` threads. The first exception (in
// index order) is rethrown after all threads finish; remaining work is
// abandoned once any job fails.
template <typename Job>
void parallel_for(std::size_t n, unsigned workers, Job&& job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;

  auto run = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

void AugmentationPolicy::validate() const {
  if (steps.empty()) throw std::invalid_argument("policy has no steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::visit(
        [&](const auto& step) {
          using T = std::decay_t<decltype(step)>;
          check_prob(step.prob, i);
          if constexpr (std::is_same_v<T, ShadowStep>) {
            if (step.specs.empty()) {
              throw std::invalid_argument("step " + std::to_string(i) +
                                          ": shadow step needs at least one spec");
            }
          } else if constexpr (std::is_same_v<T, PoleShadowStep>) {
            if (step.models.empty()) {
              throw std::invalid_argument("step " + std::to_string(i) +
                                          ": pole step needs at least one model");
            }
            for (const auto& m : step.models) m.validate();
          } else if constexpr (std::is_same_v<T, BrightnessStep>) {
            if (!(step.factor > 0.0 && step.factor <= 1.0)) {
              throw std::invalid_argument("step " + std::to_string(i) +
                                          ": brightness factor must be in (0, 1]");
            }
          }
        },
        steps[i]);
  }
}

std::uint64_t derive_image_seed(std::uint64_t master_seed,
                                std::string_view relative_path) {
  std::uint64_t h = kFnvOffset;
  for (const char c : relative_path) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return mix64(mix64(h) ^ master_seed);
}

DeviateStream::DeviateStream(std::uint64_t seed) : engine_(seed) {}

double DeviateStream::next() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t DeviateStream::next_index(std::size_t n) {
  const auto i = static_cast<std::size_t>(next() * static_cast<double>(n));
  return std::min(i, n - 1);
}

AugmentResult augment_image(const ImageBuffer& img,
                            const AugmentationPolicy& policy,
                            std::uint64_t image_seed) {
  DeviateStream deviates(image_seed);
  AugmentResult result{img, {}};
  ImageBuffer& out = result.image;
  for (const PolicyStep& step : policy.steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          const bool fired = deviates.next() < s.prob;
          if (!fired) return;
          if constexpr (std::is_same_v<T, FlipStep>) {
            out = horizontal_flip(out);
            result.applied_ops.push_back({"flip", json::object()});
          } else if constexpr (std::is_same_v<T, ShadowStep>) {
            const std::size_t choice = deviates.next_index(s.specs.size());
            const ShadowSpec& spec = s.specs[choice];
            out = apply_shadow(out, spec);
            result.applied_ops.push_back(
                {"shadow",
                 {{"choice", choice},
                  {"shadow_factor", spec.shadow_factor()},
                  {"vertices", vertices_to_json(spec.polygon())}}});
          } else if constexpr (std::is_same_v<T, PoleShadowStep>) {
            const std::size_t choice = deviates.next_index(s.models.size());
            const PoleShadowModel& model = s.models[choice];
            out = apply_pole_shadow(out, model);
            json params = pole_model_to_json(model);
            params["choice"] = choice;
            result.applied_ops.push_back({"pole_shadow", std::move(params)});
          } else if constexpr (std::is_same_v<T, BrightnessStep>) {
            out = reduce_brightness(out, s.factor);
            result.applied_ops.push_back(
                {"reduce_brightness", {{"factor", s.factor}}});
          } else if constexpr (std::is_same_v<T, JitterStep>) {
            const double draw = deviates.next();
            const double factor = s.range.factor_for(draw);
            out = reduce_brightness(out, factor);
            result.applied_ops.push_back(
                {"jitter_brightness", {{"draw", draw}, {"factor", factor}}});
          }
        },
        step);
  }
  return result;
}

DatasetManifest scan_dataset(const fs::path& root) {
  DatasetManifest manifest;
  for (const Candidate& c : list_candidates(root)) {
    if (try_decode(c.absolute)) {
      manifest.entries.push_back({c.relative_path, c.class_label, {}, 0});
    } else {
      manifest.skipped.push_back(c.relative_path);
    }
  }
  return manifest;
}

std::string output_relative_path(std::string_view relative_path) {
  std::string out(relative_path);
  if (!fs::path(out).extension().string().ends_with(".png")) out += ".png";
  return out;
}

DatasetManifest augment_dataset(const fs::path& root, const fs::path& out,
                                const AugmentationPolicy& policy,
                                const AugmentDatasetOptions& options) {
  policy.validate();
  const std::vector<Candidate> candidates = list_candidates(root);

  std::set<std::string> outputs;
  for (const Candidate& c : candidates) {
    if (!outputs.insert(output_relative_path(c.relative_path)).second) {
      throw InputError("two inputs map to the same output file: " +
                       output_relative_path(c.relative_path));
    }
  }

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());

  struct Outcome {
    bool decoded = false;
    ManifestEntry entry;
  };
  std::vector<Outcome> outcomes(candidates.size());

  parallel_for(candidates.size(), options.workers, [&](std::size_t i) {
    const Candidate& c = candidates[i];
    std::optional<ImageBuffer> img = try_decode(c.absolute);
    if (!img) return;
    const std::uint64_t seed = derive_image_seed(policy.master_seed, c.relative_path);
    AugmentResult result = augment_image(*img, policy, seed);

    const fs::path target = out / fs::path(output_relative_path(c.relative_path));
    std::error_code dir_ec;
    fs::create_directories(target.parent_path(), dir_ec);
    if (dir_ec) {
      throw IoError("cannot create " + target.parent_path().string() + ": " +
                    dir_ec.message());
    }
    write_png_file(target, result.image);
    outcomes[i] = {true,
                   {c.relative_path, c.class_label,
                    std::move(result.applied_ops), seed}};
  });

  DatasetManifest manifest;
  manifest.master_seed = policy.master_seed;
  manifest.policy = policy_to_json(policy);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (outcomes[i].decoded) {
      manifest.entries.push_back(std::move(outcomes[i].entry));
    } else {
      manifest.skipped.push_back(candidates[i].relative_path);
    }
  }
  const std::string text = manifest_to_json(manifest).dump(2) + "\n";
  write_file_bytes(out / "manifest.json",
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
  return manifest;
}

json shadow_spec_to_json(const ShadowSpec& spec) {
  return {{"vertices", vertices_to_json(spec.polygon())},
          {"shadow_factor", spec.shadow_factor()}};
}

ShadowSpec shadow_spec_from_json(const json& doc) {
  return shadow_spec_from_json_at(doc, "$");
}

json pole_model_to_json(const PoleShadowModel& model) {
  return {{"alpha", model.alpha},
          {"width_level", model.width_level},
          {"rotation_deg", model.rotation_deg},
          {"translation", model.translation}};
}

PoleShadowModel pole_model_from_json(const json& doc) {
  return pole_model_from_json_at(doc, "$");
}

json policy_to_json(const AugmentationPolicy& policy) {
  json steps = json::array();
  for (const PolicyStep& step : policy.steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          json j{{"prob", s.prob}};
          if constexpr (std::is_same_v<T, FlipStep>) {
            j["op"] = "flip";
          } else if constexpr (std::is_same_v<T, ShadowStep>) {
            j["op"] = "shadow";
            j["specs"] = json::array();
            for (const auto& spec : s.specs) j["specs"].push_back(shadow_spec_to_json(spec));
          } else if constexpr (std::is_same_v<T, PoleShadowStep>) {
            j["op"] = "pole_shadow";
            j["models"] = json::array();
            for (const auto& m : s.models) j["models"].push_back(pole_model_to_json(m));
          } else if constexpr (std::is_same_v<T, BrightnessStep>) {
            j["op"] = "reduce_brightness";
            j["factor"] = s.factor;
          } else if constexpr (std::is_same_v<T, JitterStep>) {
            j["op"] = "jitter_brightness";
            j["low"] = s.range.low();
            j["high"] = s.range.high();
          }
          steps.push_back(std::move(j));
        },
        step);
  }
  return {{"master_seed", policy.master_seed}, {"steps", std::move(steps)}};
}

AugmentationPolicy policy_from_json(const json& doc) {
  const std::string root = "$";
  AugmentationPolicy policy;
  if (!doc.is_object()) throw InputError("$: policy must be a JSON object");
  if (doc.contains("master_seed")) {
    const json& seed = doc["master_seed"];
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
      throw InputError("$.master_seed: expected an unsigned 64-bit integer");
    }
    policy.master_seed = seed.get<std::uint64_t>();
  }
  const json& steps = require(doc, "steps", root);
  if (!steps.is_array()) throw InputError("$.steps: expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string path = "$.steps[" + std::to_string(i) + "]";
    const json& s = steps[i];
    const json& op_json = require(s, "op", path);
    if (!op_json.is_string()) throw InputError(path + ".op: expected a string");
    const std::string op = op_json.get<std::string>();
    const double prob = number_or(s, "prob", 1.0, path);
    if (op == "flip") {
      policy.steps.emplace_back(FlipStep{prob});
    } else if (op == "shadow") {
      const json& specs = require(s, "specs", path);
      if (!specs.is_array()) throw InputError(path + ".specs: expected an array");
      ShadowStep step{prob, {}};
      for (std::size_t k = 0; k < specs.size(); ++k) {
        step.specs.push_back(shadow_spec_from_json_at(
            specs[k], path + ".specs[" + std::to_string(k) + "]"));
      }
      policy.steps.emplace_back(std::move(step));
    } else if (op == "pole_shadow") {
      const json& models = require(s, "models", path);
      if (!models.is_array()) throw InputError(path + ".models: expected an array");
      PoleShadowStep step{prob, {}};
      for (std::size_t k = 0; k < models.size(); ++k) {
        step.models.push_back(pole_model_from_json_at(
            models[k], path + ".models[" + std::to_string(k) + "]"));
      }
      policy.steps.emplace_back(std::move(step));
    } else if (op == "reduce_brightness") {
      policy.steps.emplace_back(BrightnessStep{prob, number_at(s, "factor", path)});
    } else if (op == "jitter_brightness") {
      const double low = number_at(s, "low", path);
      const double high = number_at(s, "high", path);
      policy.steps.emplace_back(JitterStep{
          prob, rethrow_with_path(path, [&] { return BrightnessJitterRange(low, high); })});
    } else {
      throw InputError(path + ".op: unknown operation '" + op + "'");
    }
  }
  rethrow_with_path(root, [&] {
    policy.validate();
    return 0;
  });
  return policy;
}

json manifest_to_json(const DatasetManifest& manifest) {
  json entries = json::array();
  for (const ManifestEntry& e : manifest.entries) {
    json ops = json::array();
    for (const AppliedOp& op : e.applied_ops) {
      ops.push_back({{"op", op.op}, {"params", op.params}});
    }
    entries.push_back({{"relative_path", e.relative_path},
                       {"class_label", e.class_label},
                       {"image_seed", e.image_seed},
                       {"applied_ops", std::move(ops)}});
  }
  return {{"master_seed", manifest.master_seed},
          {"policy", manifest.policy},
          {"entries", std::move(entries)},
          {"skipped", manifest.skipped}};
}

std::vector<std::string> policy_preset_names() {
  return {"flip-shadow50", "brightness50", "brightness50-p50", "jitter-025-1"};
}

AugmentationPolicy policy_preset(std::string_view name,
                                 std::uint64_t master_seed) {
  AugmentationPolicy policy;
  policy.master_seed = master_seed;
  if (name == "flip-shadow50") {
    ShadowStep shadow{0.5, {}};
    for (const ShadowPolygon& p : preset_polygons()) shadow.specs.emplace_back(p, 0.5);
    policy.steps = {FlipStep{0.5}, std::move(shadow)};
  } else if (name == "brightness50") {
    policy.steps = {BrightnessStep{1.0, 0.5}};
  } else if (name == "brightness50-p50") {
    policy.steps = {BrightnessStep{0.5, 0.5}};
  } else if (name == "jitter-025-1") {
    policy.steps = {JitterStep{1.0, BrightnessJitterRange(0.25, 1.0)}};
  } else {
    throw std::out_of_range("unknown policy preset: " + std::string(name));
  }
  return policy;
}

}  // namespace shadowforge
