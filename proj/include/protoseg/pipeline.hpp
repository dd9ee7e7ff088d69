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
#ifndef PROTOSEG_PIPELINE_HPP_
#define PROTOSEG_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "protoseg/config.hpp"
#include "protoseg/dataset_io.hpp"
#include "protoseg/rescore.hpp"
#include "protoseg/tensor_file.hpp"

namespace protoseg {

// manifest.json of an image dump. image_width/height of 0 mean the image is
// input_size square. anchors, when present, describes the exporter's layout
// and takes precedence over the run config.
struct DumpManifest {
  int image_id = 0;
  int input_size = 550;
  int num_prototypes = 0;  // "k"
  int num_classes = 0;     // "c", excluding background
  bool tanh_applied = true;
  std::size_t image_width = 0;
  std::size_t image_height = 0;
  std::optional<AnchorConfig> anchors;

  std::size_t width() const { return image_width ? image_width : input_size; }
  std::size_t height() const { return image_height ? image_height : input_size; }
};

nlohmann::json manifest_to_json(const DumpManifest& m);
DumpManifest manifest_from_json(const nlohmann::json& j);

// Raw head outputs for one image: proto.ytns [h x w x k], coeff.ytns [n x k],
// conf.ytns [n x (c + 1)] logits, loc.ytns [n x 4].
struct ImageDump {
  DumpManifest manifest;
  Tensor prototypes;
  Tensor coefficients;
  Tensor confidences;
  Tensor regressors;
};

// Anchor layout used to decode a dump.
AnchorConfig effective_anchors(const DumpManifest& manifest, const PipelineConfig& cfg);

// Throws InputError when shapes disagree with each other, the manifest or
// the anchor count.
void validate_dump(const ImageDump& dump, const AnchorConfig& anchors);

ImageDump load_image_dump(const std::filesystem::path& dir);
void save_image_dump(const std::filesystem::path& dir, const ImageDump& dump,
                     DType dtype = DType::kFloat32);

struct PostprocessResult {
  std::vector<DetectionRecord> detections;
  std::size_t clamped_predictions = 0;
};

// softmax -> per-class candidates -> decode -> NMS -> merge -> tanh (unless
// already applied) -> assemble -> crop -> resize -> rescore -> binarize -> RLE.
// A predictor is required when cfg.postprocess.rescore is not off.
PostprocessResult run_postprocess(const ImageDump& dump, const PipelineConfig& cfg,
                                  const IouPredictor* predictor = nullptr);

// Predictor backed by the ground truth of one image.
OracleGtIouPredictor oracle_for_image(const GroundTruthSet& gts, int image_id,
                                      double threshold = 0.5);

}  // namespace protoseg

#endif  // PROTOSEG_PIPELINE_HPP_
