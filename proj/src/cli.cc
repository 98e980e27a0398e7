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

#include "shadowforge/cli.h"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shadowforge/breakdown.h"
#include "shadowforge/codec.h"
#include "shadowforge/errors.h"
#include "shadowforge/metrics.h"
#include "shadowforge/pipeline.h"
#include "shadowforge/shadow.h"

namespace shadowforge::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for problems with how the tool was invoked.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string());
  }
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                   text.size()));
}

void write_json_file(const fs::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

// Values from --config fill in options that were not given on the command
// line. Keys are long option names without the leading dashes.
class ConfigFile {
 public:
  ConfigFile(const std::string& path, std::vector<std::string> allowed) {
    if (path.empty()) return;
    doc_ = load_json_file(path);
    if (!doc_.is_object()) throw InputError(path + ": config must be a JSON object");
    for (const auto& [key, value] : doc_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw InputError(path + ": unknown config key '" + key + "'");
      }
    }
    path_ = path;
  }

  template <typename T>
  void merge(const CLI::Option* option, const std::string& key, T& target) const {
    if (option->count() > 0) return;
    if (auto v = value<T>(key)) target = *v;
  }

  template <typename T>
  std::optional<T> value(const std::string& key) const {
    if (!doc_.contains(key) || doc_[key].is_null()) return std::nullopt;
    try {
      return doc_[key].get<T>();
    } catch (const json::exception&) {
      throw InputError(path_ + ": config key '" + key + "' has the wrong type");
    }
  }

 private:
  json doc_ = json::object();
  std::string path_;
};

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SHADOWFORGE_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t value = 0;
  const std::string text(raw);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("SHADOWFORGE_SEED is not an unsigned 64-bit integer: " + text);
  }
  return value;
}

// ---------------------------------------------------------------- augment

struct AugmentArgs {
  std::string in_dir;
  std::string out_dir;
  std::string preset;
  std::string policy_path;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string config;
};

int run_augment(const AugmentArgs& parsed, const CLI::App& cmd, std::ostream& out) {
  AugmentArgs args = parsed;
  const ConfigFile config(args.config, {"in", "out", "preset", "policy", "seed",
                                        "workers", "command", "resolved_policy"});
  config.merge(cmd.get_option("--in"), "in", args.in_dir);
  config.merge(cmd.get_option("--out"), "out", args.out_dir);
  config.merge(cmd.get_option("--preset"), "preset", args.preset);
  config.merge(cmd.get_option("--policy"), "policy", args.policy_path);
  config.merge(cmd.get_option("--workers"), "workers", args.workers);
  const bool seed_flag = cmd.get_option("--seed")->count() > 0;
  const auto config_seed = config.value<std::uint64_t>("seed");

  // A resolved-config.json carries the canonical policy; replaying it does
  // not depend on the original policy file still existing.
  const bool policy_flag = cmd.get_option("--preset")->count() > 0 ||
                           cmd.get_option("--policy")->count() > 0;
  const auto replay = policy_flag ? std::nullopt : config.value<json>("resolved_policy");

  if (args.in_dir.empty()) throw UsageError("augment: missing input directory");
  if (args.out_dir.empty()) throw UsageError("augment: missing output directory");
  if (!replay && args.preset.empty() == args.policy_path.empty()) {
    throw UsageError("augment: give exactly one of --preset or --policy");
  }
  if (args.workers == 0) throw UsageError("augment: --workers must be >= 1");
  if (!fs::is_directory(args.in_dir)) {
    throw IoError("input directory does not exist: " + args.in_dir);
  }

  AugmentationPolicy policy;
  bool policy_has_seed = false;
  if (replay) {
    policy = policy_from_json(*replay);
    policy_has_seed = replay->contains("master_seed");
  } else if (!args.preset.empty()) {
    try {
      policy = policy_preset(args.preset, 0);
    } catch (const std::out_of_range&) {
      std::string names;
      for (const auto& n : policy_preset_names()) names += "\n  " + n;
      throw UsageError("unknown preset '" + args.preset + "'; available presets:" + names);
    }
  } else {
    const json doc = load_json_file(args.policy_path);
    try {
      policy = policy_from_json(doc);
    } catch (const InputError& e) {
      throw InputError(args.policy_path + ": " + e.what());
    }
    policy_has_seed = doc.contains("master_seed");
  }
  if (seed_flag) {
    policy.master_seed = args.seed;
  } else if (config_seed) {
    policy.master_seed = *config_seed;
  } else if (!policy_has_seed) {
    policy.master_seed = env_seed().value_or(0);
  }

  const DatasetManifest manifest =
      augment_dataset(args.in_dir, args.out_dir, policy, {args.workers});

  // Worker count and output location do not influence any output byte, so
  // they are left out to keep reruns byte-identical.
  json resolved{{"command", "augment"},
                {"in", args.in_dir},
                {"preset", args.preset.empty() ? json(nullptr) : json(args.preset)},
                {"policy", args.policy_path.empty() ? json(nullptr) : json(args.policy_path)},
                {"seed", policy.master_seed},
                {"resolved_policy", policy_to_json(policy)}};
  write_json_file(fs::path(args.out_dir) / "resolved-config.json", resolved);

  std::size_t fired_shadow = 0;
  for (const auto& e : manifest.entries) {
    fired_shadow += std::any_of(e.applied_ops.begin(), e.applied_ops.end(),
                                [](const AppliedOp& op) {
                                  return op.op == "shadow" || op.op == "pole_shadow";
                                });
  }
  out << "augmented " << manifest.entries.size() << " images ("
      << manifest.skipped.size() << " skipped, " << fired_shadow
      << " shadowed) with master seed " << policy.master_seed << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- preview

struct PreviewArgs {
  std::string image;
  std::string out;
  int preset = 0;
  double shadow_factor = 0.5;
  std::string spec_path;
  std::string pole_path;
  std::string compare;
  std::string config;
};

ImageBuffer side_by_side(const ImageBuffer& left, const ImageBuffer& right) {
  ImageBuffer combined(left.width() + right.width(),
                       std::max(left.height(), right.height()));
  for (int y = 0; y < left.height(); ++y) {
    for (int x = 0; x < left.width(); ++x) combined.at(x, y) = left.at(x, y);
  }
  for (int y = 0; y < right.height(); ++y) {
    for (int x = 0; x < right.width(); ++x) {
      combined.at(left.width() + x, y) = right.at(x, y);
    }
  }
  return combined;
}

int run_preview(const PreviewArgs& parsed, const CLI::App& cmd, std::ostream& out) {
  PreviewArgs args = parsed;
  const ConfigFile config(args.config, {"image", "out", "preset", "shadow-factor",
                                        "spec", "pole", "compare", "command",
                                        "resolved_source"});
  config.merge(cmd.get_option("--image"), "image", args.image);
  config.merge(cmd.get_option("--out"), "out", args.out);
  config.merge(cmd.get_option("--preset"), "preset", args.preset);
  config.merge(cmd.get_option("--shadow-factor"), "shadow-factor", args.shadow_factor);
  config.merge(cmd.get_option("--spec"), "spec", args.spec_path);
  config.merge(cmd.get_option("--pole"), "pole", args.pole_path);
  config.merge(cmd.get_option("--compare"), "compare", args.compare);

  if (args.image.empty()) throw UsageError("preview: missing input image");
  if (args.out.empty()) throw UsageError("preview: missing output path");
  const int sources = (args.preset != 0) + !args.spec_path.empty() + !args.pole_path.empty();
  if (sources != 1) {
    throw UsageError("preview: give exactly one of --preset, --spec or --pole");
  }

  const ImageBuffer original = read_image_file(args.image);
  ImageBuffer augmented = original;
  json source;
  if (args.preset != 0) {
    if (args.preset < 1 || args.preset > 4) {
      throw UsageError("preview: --preset must be 1, 2, 3 or 4");
    }
    ShadowSpec spec = [&] {
      try {
        return ShadowSpec(preset_polygons()[args.preset - 1], args.shadow_factor);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("preview: ") + e.what());
      }
    }();
    augmented = apply_shadow(original, spec);
    source = {{"preset", args.preset}, {"spec", shadow_spec_to_json(spec)}};
  } else if (!args.spec_path.empty()) {
    const ShadowSpec spec = [&] {
      try {
        return shadow_spec_from_json(load_json_file(args.spec_path));
      } catch (const InputError& e) {
        throw InputError(args.spec_path + ": " + e.what());
      }
    }();
    augmented = apply_shadow(original, spec);
    source = {{"spec", shadow_spec_to_json(spec)}};
  } else {
    const PoleShadowModel model = [&] {
      try {
        return pole_model_from_json(load_json_file(args.pole_path));
      } catch (const InputError& e) {
        throw InputError(args.pole_path + ": " + e.what());
      }
    }();
    augmented = apply_pole_shadow(original, model);
    source = {{"pole", pole_model_to_json(model)},
              {"spec", shadow_spec_to_json(pole_to_polygon(model))}};
  }

  const fs::path out_path(args.out);
  fs::path compare_path = args.compare.empty()
                              ? out_path.parent_path() /
                                    (out_path.stem().string() + "_compare.png")
                              : fs::path(args.compare);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_png_file(out_path, augmented);
  if (compare_path.has_parent_path()) fs::create_directories(compare_path.parent_path());
  write_png_file(compare_path, side_by_side(original, augmented));

  json resolved{{"command", "preview"},
                {"image", args.image},
                {"out", args.out},
                {"compare", compare_path.generic_string()},
                {"preset", args.preset == 0 ? json(nullptr) : json(args.preset)},
                {"shadow-factor", args.shadow_factor},
                {"spec", args.spec_path.empty() ? json(nullptr) : json(args.spec_path)},
                {"pole", args.pole_path.empty() ? json(nullptr) : json(args.pole_path)},
                {"resolved_source", source}};
  fs::path config_path = out_path;
  config_path.replace_extension(".resolved-config.json");
  write_json_file(config_path, resolved);
  out << "wrote " << out_path.generic_string() << " and "
      << compare_path.generic_string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string predictions;
  std::string group_by = "class";
  std::string baseline;
  std::string out;
  std::string config;
};

json report_to_json(const AccuracyReport& report) {
  json groups = json::object();
  for (const auto& [key, t] : report.by_group) {
    groups[key] = {{"accuracy", t.accuracy()}, {"correct", t.correct}, {"count", t.total}};
  }
  return {{"key", report.key},
          {"overall",
           {{"accuracy", report.overall.accuracy()},
            {"correct", report.overall.correct},
            {"count", report.overall.total}}},
          {"by_group", std::move(groups)}};
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  auto records = read_predictions_csv(fs::path(path));
  if (records.empty()) throw InputError(path + ": no prediction rows");
  return records;
}

int run_evaluate(const EvaluateArgs& parsed, const CLI::App& cmd, std::ostream& out) {
  EvaluateArgs args = parsed;
  const ConfigFile config(args.config,
                          {"predictions", "group-by", "baseline", "out", "command"});
  config.merge(cmd.get_option("--predictions"), "predictions", args.predictions);
  config.merge(cmd.get_option("--group-by"), "group-by", args.group_by);
  config.merge(cmd.get_option("--baseline"), "baseline", args.baseline);
  config.merge(cmd.get_option("--out"), "out", args.out);
  if (args.predictions.empty()) throw UsageError("evaluate: missing predictions CSV");
  if (args.out.empty()) throw UsageError("evaluate: missing --out");

  const auto records = load_predictions(args.predictions);
  AccuracyReport report;
  try {
    report = grouped_accuracy(records, args.group_by);
  } catch (const std::invalid_argument& e) {
    throw InputError(args.predictions + ": " + e.what());
  }
  json doc = report_to_json(report);
  char line[128];
  std::snprintf(line, sizeof(line), "overall top-1 accuracy: %.6f (%llu/%llu)\n",
                report.overall.accuracy(),
                static_cast<unsigned long long>(report.overall.correct),
                static_cast<unsigned long long>(report.overall.total));
  out << line;
  if (!args.baseline.empty()) {
    const double base = top1_accuracy(load_predictions(args.baseline));
    if (base <= 0.0) throw InputError(args.baseline + ": baseline accuracy is zero");
    const double change = percent_change(base, report.overall.accuracy());
    doc["baseline"] = {{"path", args.baseline},
                       {"accuracy", base},
                       {"percent_change", change},
                       {"display", format_percent_change(change)}};
    out << "change vs baseline: " << format_percent_change(change) << "\n";
  }
  write_json_file(args.out, doc);

  fs::path config_path(args.out);
  config_path.replace_extension(".resolved-config.json");
  write_json_file(config_path, {{"command", "evaluate"},
                                {"predictions", args.predictions},
                                {"group-by", args.group_by},
                                {"baseline", args.baseline.empty() ? json(nullptr) : json(args.baseline)},
                                {"out", args.out}});
  return kExitOk;
}

// ---------------------------------------------------------------- breakdown

struct BreakdownArgs {
  std::string predictions;
  double floor = 0.60;
  double drop = 0.15;
  std::string out;
  std::string svg;
  std::string config;
};

// Accepts either a predictions CSV with an angle_deg column or a ready-made
// angle_deg,accuracy curve.
AccuracyCurve load_curve(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string first_line;
  std::getline(in, first_line);
  if (!first_line.empty() && first_line.back() == '\r') first_line.pop_back();
  if (first_line.starts_with("\xEF\xBB\xBF")) first_line.erase(0, 3);
  in.clear();
  in.seekg(0);
  try {
    if (first_line == "angle_deg,accuracy") return read_curve_csv(in);
    const auto records = load_predictions(path);
    return curve_from_predictions(records);
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.starts_with(path)) throw;
    throw InputError(path + ": " + what);
  }
}

int run_breakdown(const BreakdownArgs& parsed, const CLI::App& cmd, std::ostream& out) {
  BreakdownArgs args = parsed;
  const ConfigFile config(args.config,
                          {"predictions", "floor", "drop", "out", "svg", "command"});
  config.merge(cmd.get_option("--predictions"), "predictions", args.predictions);
  config.merge(cmd.get_option("--floor"), "floor", args.floor);
  config.merge(cmd.get_option("--drop"), "drop", args.drop);
  config.merge(cmd.get_option("--out"), "out", args.out);
  config.merge(cmd.get_option("--svg"), "svg", args.svg);
  if (args.predictions.empty()) throw UsageError("breakdown: missing predictions CSV");
  if (args.out.empty()) throw UsageError("breakdown: missing --out");
  const BreakdownConfig cfg{args.floor, args.drop};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("breakdown: ") + e.what());
  }

  const AccuracyCurve curve = load_curve(args.predictions);
  const BreakdownResult result = detect_breakdown(curve, cfg);
  write_json_file(args.out, breakdown_to_json(result));
  if (!args.svg.empty()) {
    write_text_file(args.svg, render_breakdown_svg(curve, result, cfg));
  }
  fs::path config_path(args.out);
  config_path.replace_extension(".resolved-config.json");
  write_json_file(config_path, {{"command", "breakdown"},
                                {"predictions", args.predictions},
                                {"floor", args.floor},
                                {"drop", args.drop},
                                {"out", args.out},
                                {"svg", args.svg.empty() ? json(nullptr) : json(args.svg)}});
  out << "breakdown points: +" << result.positive << " / " << result.negative << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic shadow augmentation and robustness evaluation"};
  app.name("shadowforge");
  app.require_subcommand(1);

  AugmentArgs augment;
  CLI::App* augment_cmd = app.add_subcommand(
      "augment", "Augment a class-folder dataset and write a manifest");
  augment_cmd->add_option("in,--in", augment.in_dir, "Dataset root (root/<class>/<image>)");
  augment_cmd->add_option("out,--out", augment.out_dir, "Output directory");
  augment_cmd->add_option("--preset", augment.preset,
                          "flip-shadow50 | brightness50 | brightness50-p50 | jitter-025-1");
  augment_cmd->add_option("--policy", augment.policy_path, "Policy JSON file");
  augment_cmd->add_option("--seed", augment.seed,
                          "Master seed (default: policy file, then SHADOWFORGE_SEED, then 0)");
  augment_cmd->add_option("--workers", augment.workers, "Worker threads");
  augment_cmd->add_option("--config", augment.config, "JSON file with option defaults");

  PreviewArgs preview;
  CLI::App* preview_cmd = app.add_subcommand(
      "preview", "Shadow one image and write it next to a side-by-side comparison");
  preview_cmd->add_option("image,--image", preview.image, "Input PNG or JPEG");
  preview_cmd->add_option("out,--out", preview.out, "Output PNG");
  preview_cmd->add_option("--preset", preview.preset, "Preset polygon 1-4");
  preview_cmd->add_option("--shadow-factor", preview.shadow_factor,
                          "Shadow factor for --preset (default 0.5)");
  preview_cmd->add_option("--spec", preview.spec_path, "ShadowSpec JSON file");
  preview_cmd->add_option("--pole", preview.pole_path, "PoleShadowModel JSON file");
  preview_cmd->add_option("--compare", preview.compare,
                          "Side-by-side PNG (default: <out stem>_compare.png)");
  preview_cmd->add_option("--config", preview.config, "JSON file with option defaults");

  EvaluateArgs evaluate;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Top-1 accuracy report from a predictions CSV");
  evaluate_cmd->add_option("predictions,--predictions", evaluate.predictions,
                           "Predictions CSV");
  evaluate_cmd->add_option("--group-by", evaluate.group_by,
                           "Condition column, or 'class' for true label (default)");
  evaluate_cmd->add_option("--baseline", evaluate.baseline,
                           "Baseline predictions CSV for percent change");
  evaluate_cmd->add_option("--out", evaluate.out, "Report JSON");
  evaluate_cmd->add_option("--config", evaluate.config, "JSON file with option defaults");

  BreakdownArgs breakdown;
  CLI::App* breakdown_cmd = app.add_subcommand(
      "breakdown", "Breakdown points of an accuracy-vs-pose curve");
  breakdown_cmd->add_option("predictions,--predictions", breakdown.predictions,
                            "Predictions CSV with angle_deg, or angle_deg,accuracy curve");
  breakdown_cmd->add_option("--floor", breakdown.floor, "Accuracy floor (default 0.60)");
  breakdown_cmd->add_option("--drop", breakdown.drop,
                            "Per-step drop threshold (default 0.15)");
  breakdown_cmd->add_option("--out", breakdown.out, "BreakdownResult JSON");
  breakdown_cmd->add_option("--svg", breakdown.svg, "Optional SVG chart");
  breakdown_cmd->add_option("--config", breakdown.config, "JSON file with option defaults");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (augment_cmd->parsed()) return run_augment(augment, *augment_cmd, out);
    if (preview_cmd->parsed()) return run_preview(preview, *preview_cmd, out);
    if (evaluate_cmd->parsed()) return run_evaluate(evaluate, *evaluate_cmd, out);
    if (breakdown_cmd->parsed()) return run_breakdown(breakdown, *breakdown_cmd, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace shadowforge::cli
