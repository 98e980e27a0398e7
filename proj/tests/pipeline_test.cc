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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "shadowforge/codec.h"
#include "shadowforge/errors.h"
#include "testing/test_support.h"

namespace shadowforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

ShadowSpec left_band(double factor = 0.5) {
  return ShadowSpec(preset_polygons()[0], factor);
}

AugmentationPolicy make_policy(std::vector<PolicyStep> steps, std::uint64_t seed = 1) {
  AugmentationPolicy policy;
  policy.steps = std::move(steps);
  policy.master_seed = seed;
  return policy;
}

void write_png(const fs::path& path, const ImageBuffer& img) {
  fs::create_directories(path.parent_path());
  write_png_file(path, img);
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

// Golden values computed once by an independent implementation of the
// FNV-1a / SplitMix64 chain.
TEST(DeriveImageSeedTest, FrozenGoldenValues) {
  EXPECT_EQ(derive_image_seed(0, ""), 9886184608339236366ULL);
  EXPECT_EQ(derive_image_seed(0, ""), 0x8932c885a3fe960eULL);
  EXPECT_EQ(derive_image_seed(7, "rub_back/frame_0001.png"), 6729872679385210939ULL);
  EXPECT_EQ(derive_image_seed(std::numeric_limits<std::uint64_t>::max(), "a"),
            3881080525014011596ULL);
}

TEST(DeriveImageSeedTest, Deterministic) {
  EXPECT_EQ(derive_image_seed(42, "rub_palm/x.png"), derive_image_seed(42, "rub_palm/x.png"));
  EXPECT_NE(derive_image_seed(42, "rub_palm/x.png"), derive_image_seed(43, "rub_palm/x.png"));
}

TEST(DeriveImageSeedTest, NoCollisionsOverTenThousandPaths) {
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    char path[64];
    std::snprintf(path, sizeof(path), "class_%d/frame_%05d.png", i % 7, i);
    seen.insert(derive_image_seed(123, path));
  }
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(DeviateStreamTest, MatchesEngineWith53BitResolution) {
  DeviateStream stream(99);
  std::mt19937_64 engine(99);
  for (int i = 0; i < 1000; ++i) {
    const double expected = std::ldexp(static_cast<double>(engine() >> 11), -53);
    const double got = stream.next();
    ASSERT_EQ(got, expected);
    ASSERT_GE(got, 0.0);
    ASSERT_LT(got, 1.0);
  }
}

TEST(DeviateStreamTest, IndexInRange) {
  DeviateStream stream(3);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 4000; ++i) {
    const std::size_t k = stream.next_index(4);
    ASSERT_LT(k, 4u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_GT(c, 800);
}

TEST(AugmentationPolicyTest, Validation) {
  EXPECT_THROW(make_policy({}).validate(), std::invalid_argument);
  EXPECT_THROW(make_policy({FlipStep{1.5}}).validate(), std::invalid_argument);
  EXPECT_THROW(make_policy({FlipStep{-0.1}}).validate(), std::invalid_argument);
  EXPECT_THROW(make_policy({ShadowStep{0.5, {}}}).validate(), std::invalid_argument);
  EXPECT_THROW(make_policy({PoleShadowStep{0.5, {}}}).validate(), std::invalid_argument);
  EXPECT_THROW(make_policy({BrightnessStep{1.0, 0.0}}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(make_policy({FlipStep{0.0}, FlipStep{1.0}}).validate());
}

TEST(AugmentImageTest, ForcedFlip) {
  const ImageBuffer img = testing::random_image(9, 5, 1);
  const AugmentResult r = augment_image(img, make_policy({FlipStep{1.0}}), 77);
  EXPECT_EQ(r.image, horizontal_flip(img));
  ASSERT_EQ(r.applied_ops.size(), 1u);
  EXPECT_EQ(r.applied_ops[0].op, "flip");
}

TEST(AugmentImageTest, ClosedGateIsIdentity) {
  const ImageBuffer img = testing::random_image(9, 5, 2);
  const AugmentResult r =
      augment_image(img, make_policy({ShadowStep{0.0, {left_band()}}}), 77);
  EXPECT_EQ(r.image, img);
  EXPECT_TRUE(r.applied_ops.empty());
}

TEST(AugmentImageTest, RerunIsBitIdentical) {
  const ImageBuffer img = testing::random_image(32, 24, 3);
  const AugmentationPolicy policy = policy_preset("flip-shadow50", 11);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const AugmentResult a = augment_image(img, policy, seed);
    const AugmentResult b = augment_image(img, policy, seed);
    ASSERT_EQ(a.image, b.image);
    ASSERT_EQ(a.applied_ops, b.applied_ops);
  }
}

TEST(AugmentImageTest, ShadowLandsInPostFlipCoordinates) {
  // Left half white, right half black: flip-then-shadow and shadow-then-flip
  // give different pictures.
  ImageBuffer img(10, 4, Rgb{0, 0, 0});
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) img.at(x, y) = {200, 200, 200};
  }
  const AugmentResult r =
      augment_image(img, make_policy({FlipStep{1.0}, ShadowStep{1.0, {left_band()}}}), 5);
  const ImageBuffer expected = apply_shadow(horizontal_flip(img), left_band());
  EXPECT_EQ(r.image, expected);
  EXPECT_NE(r.image, horizontal_flip(apply_shadow(img, left_band())));
  ASSERT_EQ(r.applied_ops.size(), 2u);
  EXPECT_EQ(r.applied_ops[0].op, "flip");
  EXPECT_EQ(r.applied_ops[1].op, "shadow");
}

TEST(AugmentImageTest, DeviatesConsumedInFixedOrder) {
  const ImageBuffer img(4, 4, Rgb{120, 60, 30});
  const std::uint64_t seed = 2024;
  ShadowStep shadows{1.0, {}};
  for (const ShadowPolygon& p : preset_polygons()) shadows.specs.emplace_back(p, 0.5);
  const AugmentationPolicy policy = make_policy(
      {FlipStep{0.0}, shadows, JitterStep{1.0, BrightnessJitterRange(0.25, 1.0)}});

  std::mt19937_64 engine(seed);
  auto deviate = [&] { return std::ldexp(static_cast<double>(engine() >> 11), -53); };
  deviate();                                      // flip gate, closed
  deviate();                                      // shadow gate
  const auto choice = static_cast<std::size_t>(deviate() * 4);  // spec index
  deviate();                                      // jitter gate
  const double draw = deviate();                  // jitter draw

  const AugmentResult r = augment_image(img, policy, seed);
  ASSERT_EQ(r.applied_ops.size(), 2u);
  EXPECT_EQ(r.applied_ops[0].params.at("choice").get<std::size_t>(), choice);
  EXPECT_EQ(r.applied_ops[1].params.at("draw").get<double>(), draw);
  EXPECT_EQ(r.applied_ops[1].params.at("factor").get<double>(), 0.25 + draw * 0.75);
}

TEST(AugmentImageTest, GateFrequencyWithinFourSigma) {
  const ImageBuffer img(2, 2);
  const int n = 4000;
  for (double p : {0.1, 0.5, 0.9}) {
    const AugmentationPolicy policy = make_policy({ShadowStep{p, {left_band()}}});
    int fired = 0;
    for (int i = 0; i < n; ++i) {
      const std::string path = "c/img_" + std::to_string(i) + ".png";
      fired += !augment_image(img, policy, derive_image_seed(8, path)).applied_ops.empty();
    }
    const double bound = 4.0 * std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(fired) / n, p, bound) << "p = " << p;
  }
}

TEST(AugmentImageTest, FrozenFiredCountOverTenThousandPaths) {
  const ImageBuffer img(1, 1);
  ShadowStep shadow{0.5, {}};
  for (const ShadowPolygon& p : preset_polygons()) shadow.specs.emplace_back(p, 0.5);
  const AugmentationPolicy policy = make_policy({shadow}, 20240);
  int fired = 0;
  for (int i = 0; i < 10000; ++i) {
    char path[64];
    std::snprintf(path, sizeof(path), "class_%d/img_%05d.png", i % 7, i);
    const auto seed = derive_image_seed(policy.master_seed, path);
    fired += !augment_image(img, policy, seed).applied_ops.empty();
  }
  EXPECT_EQ(fired, 4907);
}

TEST(AugmentImageTest, PoleShadowDescriptor) {
  const ImageBuffer img(8, 8, Rgb{100, 100, 100});
  const PoleShadowModel model{0.6, 0.1, 30.0, 0.2};
  const AugmentResult r = augment_image(img, make_policy({PoleShadowStep{1.0, {model}}}), 1);
  EXPECT_EQ(r.image, apply_pole_shadow(img, model));
  ASSERT_EQ(r.applied_ops.size(), 1u);
  EXPECT_EQ(r.applied_ops[0].op, "pole_shadow");
  EXPECT_EQ(r.applied_ops[0].params.at("alpha"), 0.6);
  EXPECT_EQ(r.applied_ops[0].params.at("choice"), 0);
}

TEST(ScanDatasetTest, SortedEntriesWithClassLabels) {
  TempDir dir("scan");
  write_png(dir.path() / "rub_palm" / "a.png", ImageBuffer(2, 2));
  write_png(dir.path() / "rub_back" / "b.png", ImageBuffer(2, 2));
  write_png(dir.path() / "rub_back" / "a.png", ImageBuffer(2, 2));
  const DatasetManifest m = scan_dataset(dir.path());
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[0].relative_path, "rub_back/a.png");
  EXPECT_EQ(m.entries[1].relative_path, "rub_back/b.png");
  EXPECT_EQ(m.entries[2].relative_path, "rub_palm/a.png");
  EXPECT_EQ(m.entries[0].class_label, "rub_back");
  EXPECT_EQ(m.entries[2].class_label, "rub_palm");
  EXPECT_EQ(m.entries[0].image_seed, 0u);
  EXPECT_TRUE(m.entries[0].applied_ops.empty());
  EXPECT_TRUE(m.skipped.empty());
}

TEST(ScanDatasetTest, EmptyRoot) {
  TempDir dir("empty");
  const DatasetManifest m = scan_dataset(dir.path());
  EXPECT_TRUE(m.entries.empty());
  EXPECT_TRUE(m.skipped.empty());
}

TEST(ScanDatasetTest, CorruptFileIsSkipped) {
  TempDir dir("corrupt");
  testing::write_fixture_dataset(dir.path(), 9, 3, 4, 1);
  write_text(dir.path() / "class_0" / "broken.png", "not a png at all");
  const DatasetManifest m = scan_dataset(dir.path());
  EXPECT_EQ(m.entries.size(), 9u);
  ASSERT_EQ(m.skipped.size(), 1u);
  EXPECT_EQ(m.skipped[0], "class_0/broken.png");
}

TEST(ScanDatasetTest, IgnoresRootFilesAndOtherExtensions) {
  TempDir dir("ignore");
  write_png(dir.path() / "loose.png", ImageBuffer(2, 2));
  write_text(dir.path() / "c" / "notes.txt", "hello");
  write_png(dir.path() / "c" / "UPPER.PNG", ImageBuffer(2, 2));
  const DatasetManifest m = scan_dataset(dir.path());
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.entries[0].relative_path, "c/UPPER.PNG");
}

TEST(ScanDatasetTest, MissingRootIsIoError) {
  TempDir dir("missing");
  EXPECT_THROW(scan_dataset(dir.path() / "nope"), IoError);
}

TEST(OutputRelativePathTest, AppendsPngWhenNeeded) {
  EXPECT_EQ(output_relative_path("a/b.png"), "a/b.png");
  EXPECT_EQ(output_relative_path("a/b.jpg"), "a/b.jpg.png");
  EXPECT_EQ(output_relative_path("a/b.JPEG"), "a/b.JPEG.png");
}

TEST(AugmentDatasetTest, WritesImagesAndManifest) {
  TempDir in("in"), out("out");
  testing::write_fixture_dataset(in.path(), 6, 2, 8, 10);
  write_file_bytes(in.path() / "class_1" / "photo.jpg",
                   encode_image(testing::random_image(8, 8, 4), {ImageFormat::kJpeg, 90}));
  const AugmentationPolicy policy = policy_preset("flip-shadow50", 5);
  const DatasetManifest m = augment_dataset(in.path(), out.path(), policy);

  ASSERT_EQ(m.entries.size(), 7u);
  EXPECT_EQ(m.master_seed, 5u);
  EXPECT_EQ(m.policy, policy_to_json(policy));
  for (const ManifestEntry& e : m.entries) {
    EXPECT_EQ(e.image_seed, derive_image_seed(5, e.relative_path));
    const ImageBuffer original = read_image_file(in.path() / e.relative_path);
    const ImageBuffer written =
        read_image_file(out.path() / output_relative_path(e.relative_path));
    EXPECT_EQ(written, augment_image(original, policy, e.image_seed).image);
  }
  EXPECT_TRUE(fs::exists(out.path() / "class_1" / "photo.jpg.png"));

  std::ifstream file(out.path() / "manifest.json");
  const json doc = json::parse(file);
  EXPECT_EQ(doc, manifest_to_json(m));
  EXPECT_EQ(doc.at("entries").size(), 7u);
  EXPECT_TRUE(doc.at("entries")[0].contains("applied_ops"));
}

TEST(AugmentDatasetTest, DeterministicAcrossRunsAndWorkerCounts) {
  TempDir in("in"), a("a"), b("b"), c("c");
  testing::write_fixture_dataset(in.path(), 40, 4, 12, 77);
  const AugmentationPolicy policy = policy_preset("flip-shadow50", 99);
  augment_dataset(in.path(), a.path(), policy, {1});
  augment_dataset(in.path(), b.path(), policy, {1});
  augment_dataset(in.path(), c.path(), policy, {6});
  EXPECT_EQ(testing::tree_hash(a.path()), testing::tree_hash(b.path()));
  EXPECT_EQ(testing::tree_hash(a.path()), testing::tree_hash(c.path()));
}

TEST(AugmentDatasetTest, ChangingOneInputChangesOnlyItsOutput) {
  TempDir in("in"), a("a"), b("b");
  testing::write_fixture_dataset(in.path(), 12, 3, 6, 3);
  const AugmentationPolicy policy = policy_preset("flip-shadow50", 4);
  const DatasetManifest before = augment_dataset(in.path(), a.path(), policy);
  const fs::path changed = in.path() / "class_1" / "img_00004.png";
  write_png_file(changed, testing::random_image(6, 6, 999));
  const DatasetManifest after = augment_dataset(in.path(), b.path(), policy);
  EXPECT_EQ(before.entries, after.entries);
  for (const ManifestEntry& e : before.entries) {
    const auto lhs = read_file_bytes(a.path() / e.relative_path);
    const auto rhs = read_file_bytes(b.path() / e.relative_path);
    if (e.relative_path == "class_1/img_00004.png") {
      EXPECT_NE(lhs, rhs);
    } else {
      EXPECT_EQ(lhs, rhs) << e.relative_path;
    }
  }
}

TEST(AugmentDatasetTest, CorruptInputsListedAsSkipped) {
  TempDir in("in"), out("out");
  testing::write_fixture_dataset(in.path(), 4, 2, 4, 1);
  write_text(in.path() / "class_0" / "zzz.jpg", "garbage");
  const DatasetManifest m =
      augment_dataset(in.path(), out.path(), policy_preset("brightness50", 0), {3});
  EXPECT_EQ(m.entries.size(), 4u);
  ASSERT_EQ(m.skipped.size(), 1u);
  EXPECT_EQ(m.skipped[0], "class_0/zzz.jpg");
}

TEST(AugmentDatasetTest, OutputNameCollisionIsInputError) {
  TempDir in("in"), out("out");
  write_png(in.path() / "c" / "a.jpg.png", ImageBuffer(2, 2));
  write_file_bytes(in.path() / "c" / "a.jpg",
                   encode_image(ImageBuffer(2, 2), {ImageFormat::kJpeg, 90}));
  EXPECT_THROW(augment_dataset(in.path(), out.path(), policy_preset("brightness50", 0)),
               InputError);
}

TEST(PolicyJsonTest, RoundTripsEveryStepKind) {
  const AugmentationPolicy policy = make_policy(
      {FlipStep{0.5}, ShadowStep{0.25, {left_band(0.3)}},
       PoleShadowStep{1.0, {PoleShadowModel{0.4, 0.1, 15.0, -0.5}}},
       BrightnessStep{0.5, 0.5}, JitterStep{1.0, BrightnessJitterRange(0.25, 1.0)}},
      std::numeric_limits<std::uint64_t>::max());
  const json doc = policy_to_json(policy);
  const AugmentationPolicy back = policy_from_json(json::parse(doc.dump()));
  EXPECT_EQ(policy_to_json(back), doc);
  EXPECT_EQ(back.master_seed, policy.master_seed);
}

TEST(PolicyJsonTest, ErrorsNameTheField) {
  auto message = [](const std::string& text) -> std::string {
    try {
      policy_from_json(json::parse(text));
    } catch (const InputError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message(R"({"steps": [{"op": "flip"}, {"op": "flip", "prob": "x"}]})")
                .find("$.steps[1].prob"),
            std::string::npos);
  EXPECT_NE(message(R"({"steps": [{"op": "warp"}]})").find("$.steps[0].op"),
            std::string::npos);
  EXPECT_NE(message(R"({"steps": [{"op": "shadow", "specs": [{"vertices": [[0,0],[1,0]],
                      "shadow_factor": 0.5}]}]})")
                .find("$.steps[0].specs[0].vertices"),
            std::string::npos);
  EXPECT_NE(message(R"({"steps": []})"), "");
  EXPECT_NE(message(R"({"master_seed": -1, "steps": [{"op": "flip"}]})").find("master_seed"),
            std::string::npos);
  EXPECT_NE(message(R"({"steps": [{"op": "jitter_brightness", "low": 0.9, "high": 0.1}]})"),
            "");
}

TEST(PolicyPresetTest, KnownNames) {
  for (const std::string& name : policy_preset_names()) {
    EXPECT_NO_THROW(policy_preset(name, 1).validate()) << name;
  }
  EXPECT_THROW(policy_preset("nope", 1), std::out_of_range);
  const AugmentationPolicy canonical = policy_preset("flip-shadow50", 3);
  ASSERT_EQ(canonical.steps.size(), 2u);
  EXPECT_EQ(std::get<FlipStep>(canonical.steps[0]).prob, 0.5);
  const auto& shadow = std::get<ShadowStep>(canonical.steps[1]);
  EXPECT_EQ(shadow.prob, 0.5);
  ASSERT_EQ(shadow.specs.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(shadow.specs[i].polygon(), preset_polygons()[i]);
    EXPECT_EQ(shadow.specs[i].shadow_factor(), 0.5);
  }
}

TEST(PolicyPresetTest, Brightness50MatchesReduceBrightness) {
  const ImageBuffer img = testing::random_image(16, 16, 6);
  const AugmentResult r = augment_image(img, policy_preset("brightness50", 0), 12345);
  EXPECT_EQ(r.image, reduce_brightness(img, 0.5));
}

}  // namespace
}  // namespace shadowforge
