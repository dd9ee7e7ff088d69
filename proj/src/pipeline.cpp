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

#include <algorithm>
#include <fstream>

#include "protoseg/errors.hpp"
#include "protoseg/maskops.hpp"
#include "protoseg/numerics.hpp"

namespace protoseg {

using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kProtoName = "proto.ytns";
constexpr const char* kCoeffName = "coeff.ytns";
constexpr const char* kConfName = "conf.ytns";
constexpr const char* kLocName = "loc.ytns";

}  // namespace

json manifest_to_json(const DumpManifest& m) {
  json j = {{"image_id", m.image_id},
            {"input_size", m.input_size},
            {"k", m.num_prototypes},
            {"c", m.num_classes},
            {"tanh_applied", m.tanh_applied},
            {"image_width", m.width()},
            {"image_height", m.height()}};
  if (m.anchors) j["anchors"] = anchor_config_to_json(*m.anchors);
  return j;
}

DumpManifest manifest_from_json(const json& j) {
  if (!j.is_object()) throw InputError("manifest: expected a JSON object");
  static const std::vector<std::string> allowed{"image_id",    "input_size",  "k",
                                                "c",           "tanh_applied", "image_width",
                                                "image_height", "anchors"};
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw InputError("manifest: unknown key \"" + item.key() + "\"");
    }
  }
  DumpManifest m;
  try {
    m.image_id = j.value("image_id", 0);
    m.input_size = j.at("input_size").get<int>();
    m.num_prototypes = j.at("k").get<int>();
    m.num_classes = j.at("c").get<int>();
    m.tanh_applied = j.at("tanh_applied").get<bool>();
    m.image_width = j.value("image_width", std::size_t{0});
    m.image_height = j.value("image_height", std::size_t{0});
  } catch (const json::exception& e) {
    throw InputError(std::string("manifest: ") + e.what());
  }
  if (m.input_size <= 0 || m.num_prototypes <= 0 || m.num_classes <= 0) {
    throw InputError("manifest: input_size, k and c must be > 0");
  }
  if (j.contains("anchors")) {
    m.anchors = anchor_config_from_json(j["anchors"]);
    if (m.anchors->input_size != m.input_size) {
      throw InputError("manifest: anchors.input_size differs from input_size");
    }
  }
  return m;
}

AnchorConfig effective_anchors(const DumpManifest& manifest, const PipelineConfig& cfg) {
  if (manifest.anchors) return *manifest.anchors;
  AnchorConfig anchors = cfg.anchors;
  anchors.input_size = manifest.input_size;
  return anchors;
}

void validate_dump(const ImageDump& dump, const AnchorConfig& anchors) {
  const DumpManifest& m = dump.manifest;
  const auto k = static_cast<std::size_t>(m.num_prototypes);
  const auto c = static_cast<std::size_t>(m.num_classes);
  const std::size_t n = anchors.anchor_count();
  auto fail = [](const std::string& what, const Tensor& t) {
    throw InputError("image dump: " + what + " has shape " + shape_to_string(t.shape()));
  };
  if (dump.prototypes.rank() != 3 || dump.prototypes.dim(2) != k) {
    fail("proto (expected h x w x " + std::to_string(k) + ")", dump.prototypes);
  }
  if (dump.coefficients.rank() != 2 || dump.coefficients.dim(0) != n ||
      dump.coefficients.dim(1) != k) {
    fail("coeff (expected " + std::to_string(n) + " x " + std::to_string(k) + ")",
         dump.coefficients);
  }
  if (dump.confidences.rank() != 2 || dump.confidences.dim(0) != n ||
      dump.confidences.dim(1) != c + 1) {
    fail("conf (expected " + std::to_string(n) + " x " + std::to_string(c + 1) + ")",
         dump.confidences);
  }
  if (dump.regressors.rank() != 2 || dump.regressors.dim(0) != n ||
      dump.regressors.dim(1) != 4) {
    fail("loc (expected " + std::to_string(n) + " x 4)", dump.regressors);
  }
}

ImageDump load_image_dump(const std::filesystem::path& dir) {
  ImageDump dump;
  dump.manifest = manifest_from_json(read_json_file(dir / kManifestName));
  dump.prototypes = read_tensor_file(dir / kProtoName).tensor;
  dump.coefficients = read_tensor_file(dir / kCoeffName).tensor;
  dump.confidences = read_tensor_file(dir / kConfName).tensor;
  dump.regressors = read_tensor_file(dir / kLocName).tensor;
  return dump;
}

void save_image_dump(const std::filesystem::path& dir, const ImageDump& dump, DType dtype) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / kManifestName, std::ios::trunc);
    if (!out) throw InputError("cannot write " + (dir / kManifestName).string());
    out << manifest_to_json(dump.manifest).dump(2) << '\n';
  }
  write_tensor_file(dir / kProtoName, dump.prototypes, dtype);
  write_tensor_file(dir / kCoeffName, dump.coefficients, dtype);
  write_tensor_file(dir / kConfName, dump.confidences, dtype);
  write_tensor_file(dir / kLocName, dump.regressors, dtype);
}

PostprocessResult run_postprocess(const ImageDump& dump, const PipelineConfig& cfg,
                                  const IouPredictor* predictor) {
  cfg.validate();
  const AnchorConfig anchor_cfg = effective_anchors(dump.manifest, cfg);
  validate_dump(dump, anchor_cfg);
  const bool rescoring = cfg.postprocess.rescore != RescoreMode::kOff;
  if (rescoring && predictor == nullptr) {
    throw InputError("postprocess: rescoring is enabled but no IoU predictor was given");
  }

  const DumpManifest& m = dump.manifest;
  const AnchorSet anchors = generate_anchors(anchor_cfg);
  const Tensor scores = activate(dump.confidences, Activation::kSoftmaxLastDim);
  const auto boxes = decode_boxes(anchors, dump.regressors, anchor_cfg.variances);

  const auto candidates = gather_candidates(scores, boxes, cfg.nms);
  const auto kept = run_nms(candidates, cfg.nms, cfg.postprocess.nms_kind);
  auto merged = merge_kept(candidates, kept, cfg.nms);
  std::erase_if(merged, [&](const MergedDetection& d) {
    return d.score <= cfg.postprocess.final_score_threshold;
  });

  PostprocessResult result;
  if (merged.empty()) return result;

  const std::size_t k = dump.coefficients.dim(1);
  Tensor selected({merged.size(), k});
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const auto row = dump.coefficients.slice(merged[i].index);
    std::copy(row.begin(), row.end(), selected.slice(i).begin());
  }
  const CoefficientMatrix coefficients = m.tanh_applied
                                             ? CoefficientMatrix(std::move(selected))
                                             : CoefficientMatrix::from_raw(selected);
  const PrototypeStack prototypes(dump.prototypes, cfg.postprocess.enforce_relu);
  const Tensor soft = assemble_masks(prototypes, coefficients);

  const double input = static_cast<double>(m.input_size);
  const std::size_t out_w = m.width(), out_h = m.height();
  const double sx = static_cast<double>(out_w) / input;
  const double sy = static_cast<double>(out_h) / input;

  std::vector<Detection> dets;
  dets.reserve(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    Detection d;
    d.class_id = merged[i].class_id;
    d.score = merged[i].score;
    d.final_score = merged[i].score;
    d.anchor_index = merged[i].index;
    const Box& b = merged[i].box;
    d.box = {b.x1 * sx, b.y1 * sy, b.x2 * sx, b.y2 * sy};
    const Tensor cropped =
        crop_mask(mask_plane(soft, i), b, input, input, cfg.postprocess.crop_padding);
    d.soft_mask = resize_bilinear(cropped, out_h, out_w);
    dets.push_back(std::move(d));
  }

  if (rescoring) {
    auto rescored = rescore_detections(std::move(dets), *predictor);
    dets = std::move(rescored.detections);
    result.clamped_predictions = rescored.clamped;
  }

  result.detections.reserve(dets.size());
  for (const Detection& d : dets) {
    DetectionRecord rec;
    rec.image_id = m.image_id;
    rec.category = d.class_id;
    rec.score = d.score;
    rec.final_score = d.final_score;
    rec.box = d.box;
    rec.mask = rle_encode(binarize(d.soft_mask, cfg.postprocess.mask_threshold));
    result.detections.push_back(std::move(rec));
  }
  return result;
}

OracleGtIouPredictor oracle_for_image(const GroundTruthSet& gts, int image_id,
                                      double threshold) {
  std::vector<BinaryMask> masks;
  std::vector<int> classes;
  for (const auto& a : gts.annotations) {
    if (a.image_id != image_id) continue;
    masks.push_back(a.mask);
    classes.push_back(a.category_id);
  }
  return OracleGtIouPredictor(std::move(masks), std::move(classes), threshold);
}

}  // namespace protoseg
