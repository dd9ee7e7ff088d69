/* Copyright 2026 The Protoseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "protoseg/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "protoseg/dataset_io.hpp"
#include "protoseg/errors.hpp"
#include "synthetic_dump.hpp"

namespace protoseg {
namespace {

using testing::make_dump;
using testing::one_hot_coefficients;
using testing::PlantedDetection;
using testing::prototypes_from_masks;
using testing::rect_mask;
using testing::small_anchor_config;

// Level 0 of the small config is an 8 x 8 grid of 16 px anchors.
std::size_t level0_anchor(std::size_t row, std::size_t col) { return row * 8 + col; }

PipelineConfig base_config() {
  PipelineConfig cfg;
  cfg.nms.top_n = 50;
  return cfg;
}

// Two separated rectangles of classes 1 and 2 at prototype resolution.
struct TwoObjects {
  std::vector<BinaryMask> proto_masks{rect_mask(16, 16, 1, 1, 6, 5), rect_mask(16, 16, 9, 8, 15, 14)};
  std::vector<Box> boxes{{4, 4, 24, 20}, {36, 32, 60, 56}};

  ImageDump dump() const {
    const Tensor p = prototypes_from_masks(proto_masks);
    std::vector<PlantedDetection> planted{
        {level0_anchor(1, 1), 1, 0.95, boxes[0], one_hot_coefficients(0, 3)},
        {level0_anchor(5, 5), 2, 0.85, boxes[1], one_hot_coefficients(1, 3)},
        // Lower-scored duplicate of the first object on a neighbouring anchor.
        {level0_anchor(1, 2), 1, 0.6, {5, 4, 25, 20}, one_hot_coefficients(0, 3)}};
    return make_dump(small_anchor_config(), 2, p, planted);
  }
};

TEST(PipelineTest, AllBackgroundGivesNoDetections) {
  const ImageDump dump = make_dump(small_anchor_config(), 3, Tensor({16, 16, 2}, 1.0), {});
  EXPECT_TRUE(run_postprocess(dump, base_config()).detections.empty());
}

TEST(PipelineTest, RecoversPlantedObjects) {
  const TwoObjects scene;
  const auto result = run_postprocess(scene.dump(), base_config());
  ASSERT_EQ(result.detections.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const DetectionRecord& d = result.detections[i];
    EXPECT_EQ(d.category, static_cast<int>(i + 1));
    EXPECT_NEAR(d.score, i == 0 ? 0.95 : 0.85, 1e-12);
    EXPECT_EQ(d.final_score, d.score);
    EXPECT_NEAR(d.box.x1, scene.boxes[i].x1, 1e-9);
    EXPECT_NEAR(d.box.y2, scene.boxes[i].y2, 1e-9);
    const BinaryMask expected = testing::upsample_threshold(scene.proto_masks[i], 4);
    EXPECT_EQ(rle_decode(d.mask), expected);
  }
}

TEST(PipelineTest, FastAndTraditionalAgreeOnSeparatedObjects) {
  const ImageDump dump = TwoObjects{}.dump();
  PipelineConfig fast = base_config(), trad = base_config();
  trad.postprocess.nms_kind = NmsKind::kTraditional;
  EXPECT_EQ(format_detection_dump(run_postprocess(dump, fast).detections),
            format_detection_dump(run_postprocess(dump, trad).detections));
}

TEST(PipelineTest, RepeatedRunsAreByteIdentical) {
  const ImageDump dump = TwoObjects{}.dump();
  EXPECT_EQ(format_detection_dump(run_postprocess(dump, base_config()).detections),
            format_detection_dump(run_postprocess(dump, base_config()).detections));
}

TEST(PipelineTest, ConstantOnePredictorMatchesRescoringOff) {
  const ImageDump dump = TwoObjects{}.dump();
  PipelineConfig on = base_config();
  on.postprocess.rescore = RescoreMode::kOracle;
  const ConstantOnePredictor one;
  EXPECT_EQ(format_detection_dump(run_postprocess(dump, on, &one).detections),
            format_detection_dump(run_postprocess(dump, base_config()).detections));
  EXPECT_THROW(run_postprocess(dump, on), InputError);
}

TEST(PipelineTest, RawCoefficientsGetTanh) {
  ImageDump dump = TwoObjects{}.dump();
  const auto expected = format_detection_dump(run_postprocess(dump, base_config()).detections);
  for (double& v : dump.coefficients.data()) v = std::atanh(v);
  dump.manifest.tanh_applied = false;
  EXPECT_EQ(format_detection_dump(run_postprocess(dump, base_config()).detections), expected);
}

TEST(PipelineTest, ImageResolutionScaling) {
  ImageDump dump = TwoObjects{}.dump();
  dump.manifest.image_width = 128;
  dump.manifest.image_height = 96;
  const auto dets = run_postprocess(dump, base_config()).detections;
  ASSERT_FALSE(dets.empty());
  EXPECT_EQ(dets[0].mask.height, 96u);
  EXPECT_EQ(dets[0].mask.width, 128u);
  EXPECT_NEAR(dets[0].box.x2, 24 * 2.0, 1e-9);
  EXPECT_NEAR(dets[0].box.y2, 20 * 1.5, 1e-9);
}

TEST(PipelineTest, FinalScoreThresholdDropsWeakDetections) {
  PipelineConfig cfg = base_config();
  cfg.postprocess.final_score_threshold = 0.9;
  const auto dets = run_postprocess(TwoObjects{}.dump(), cfg).detections;
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].category, 1);
}

TEST(PipelineTest, ShapeMismatchesRejected) {
  ImageDump dump = TwoObjects{}.dump();
  ImageDump bad = dump;
  bad.regressors = Tensor({3, 4});
  EXPECT_THROW(run_postprocess(bad, base_config()), InputError);
  bad = dump;
  bad.prototypes = Tensor({16, 16, 2});
  EXPECT_THROW(run_postprocess(bad, base_config()), InputError);
  bad = dump;
  bad.confidences = Tensor({dump.confidences.dim(0), 5});
  EXPECT_THROW(run_postprocess(bad, base_config()), InputError);
  bad = dump;
  bad.manifest.anchors.reset();  // falls back to the 550 config
  EXPECT_THROW(run_postprocess(bad, base_config()), InputError);
}

TEST(PipelineTest, ManifestParsing) {
  using nlohmann::json;
  const json good = {{"input_size", 64}, {"k", 3}, {"c", 2}, {"tanh_applied", true}};
  const DumpManifest m = manifest_from_json(good);
  EXPECT_EQ(m.width(), 64u);
  EXPECT_FALSE(m.anchors.has_value());
  json extra = good;
  extra["prototypes"] = 3;
  EXPECT_THROW(manifest_from_json(extra), InputError);
  json missing = good;
  missing.erase("k");
  EXPECT_THROW(manifest_from_json(missing), InputError);
  json mismatch = good;
  mismatch["anchors"] = anchor_config_to_json(small_anchor_config(128));
  EXPECT_THROW(manifest_from_json(mismatch), InputError);
  json with_anchors = good;
  with_anchors["anchors"] = anchor_config_to_json(small_anchor_config());
  const DumpManifest ma = manifest_from_json(with_anchors);
  EXPECT_EQ(effective_anchors(ma, PipelineConfig{}).anchor_count(), 84u);
  EXPECT_EQ(effective_anchors(m, PipelineConfig{}).input_size, 64);
}

TEST(PipelineTest, DumpDirectoryRoundTrip) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "pipeline_test_dump";
  std::filesystem::remove_all(dir);
  const ImageDump dump = TwoObjects{}.dump();
  save_image_dump(dir, dump, DType::kFloat64);
  const ImageDump back = load_image_dump(dir);
  EXPECT_EQ(back.prototypes, dump.prototypes);
  EXPECT_EQ(back.coefficients, dump.coefficients);
  EXPECT_EQ(back.confidences, dump.confidences);
  EXPECT_EQ(back.regressors, dump.regressors);
  EXPECT_EQ(manifest_to_json(back.manifest), manifest_to_json(dump.manifest));
  std::ofstream(dir / "proto.ytns", std::ios::binary | std::ios::trunc) << "YTNS\x02";
  EXPECT_THROW(load_image_dump(dir), FormatError);
  std::filesystem::remove_all(dir);
}

TEST(PipelineTest, OracleForImageUsesThatImageOnly) {
  GroundTruthSet g;
  g.images = {{1, 8, 8, ""}, {2, 8, 8, ""}};
  g.annotations = {{1, 1, 1, {0, 0, 4, 4}, rect_mask(8, 8, 0, 0, 4, 4)},
                   {2, 2, 1, {4, 4, 8, 8}, rect_mask(8, 8, 4, 4, 8, 8)}};
  Tensor soft({8, 8});
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) soft(y, x) = 1.0;
  }
  EXPECT_EQ(oracle_for_image(g, 1).predict(soft, 1), 1.0);
  EXPECT_EQ(oracle_for_image(g, 2).predict(soft, 1), 0.0);
}

}  // namespace
}  // namespace protoseg
