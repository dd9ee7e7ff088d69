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
#ifndef PROTOSEG_DATASET_IO_HPP_
#define PROTOSEG_DATASET_IO_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "protoseg/eval.hpp"
#include "protoseg/maskops.hpp"

namespace protoseg {

// One line of a detection dump (JSON lines):
//   {"image_id", "category", "score", "final_score", "bbox": [x, y, w, h],
//    "mask": {"size": [h, w], "counts": [...]}}
struct DetectionRecord {
  int image_id = 0;
  int category = 0;
  double score = 0;
  double final_score = 0;
  Box box;
  RleMask mask;
};

nlohmann::json rle_to_json(const RleMask& rle);
RleMask rle_from_json(const nlohmann::json& j);

nlohmann::json detection_to_json(const DetectionRecord& det);
DetectionRecord detection_from_json(const nlohmann::json& j);

std::string format_detection_dump(std::span<const DetectionRecord> dets);
std::vector<DetectionRecord> parse_detection_dump(const std::string& text);
void write_detection_dump(const std::filesystem::path& path,
                          std::span<const DetectionRecord> dets);
std::vector<DetectionRecord> read_detection_dump(const std::filesystem::path& path);

// COCO-shaped subset: images, annotations with uncompressed RLE
// segmentation, categories. No crowd handling.
GroundTruthSet ground_truth_from_json(const nlohmann::json& j);
nlohmann::json ground_truth_to_json(const GroundTruthSet& gts);
GroundTruthSet load_ground_truth(const std::filesystem::path& path);

// Ranks by final_score when use_final_score, else by the raw confidence.
EvalDetection to_eval_detection(const DetectionRecord& det, bool use_final_score = true);

nlohmann::json ap_report_to_json(const ApReport& report);

}  // namespace protoseg

#endif  // PROTOSEG_DATASET_IO_HPP_
