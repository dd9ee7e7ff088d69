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
#ifndef PROTOSEG_EVAL_HPP_
#define PROTOSEG_EVAL_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "protoseg/geometry.hpp"
#include "protoseg/maskops.hpp"

namespace protoseg {

struct GtImage {
  int id = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::string file_name;
};

struct GtAnnotation {
  int id = 0;
  int image_id = 0;
  int category_id = 0;
  Box box;
  BinaryMask mask;
};

struct GroundTruthSet {
  std::vector<GtImage> images;
  std::vector<GtAnnotation> annotations;
  std::vector<int> categories;

  // Every annotation refers to a known image and its mask matches the
  // image size. Throws InputError otherwise.
  void validate() const;
  const GtImage* find_image(int id) const;
};

struct EvalDetection {
  int image_id = 0;
  int category_id = 0;
  double score = 0;
  Box box;
  BinaryMask mask;
};

enum class IouKind { kBox, kMask };

struct EvalOptions {
  // Defaults to 0.50:0.05:0.95.
  std::vector<double> thresholds;
  std::size_t max_detections_per_image = 100;
  // Adds AP for small (< 32^2), medium and large (> 96^2) objects.
  bool area_breakdown = false;
};

struct ApReport {
  double ap = 0;
  double ap50 = 0;
  double ap75 = 0;
  std::vector<double> thresholds;
  // Class AP averaged over thresholds. Classes with detections but no ground
  // truth report 0 and are left out of the averages.
  std::map<int, double> per_class;
  std::map<int, std::vector<double>> per_class_per_threshold;
  std::optional<double> ap_small, ap_medium, ap_large;
};

std::vector<double> coco_iou_thresholds();

// 101-point interpolated AP of a precision/recall sequence ordered by
// descending score: mean over r in {0, 0.01, ..., 1} of the best precision
// reached at recall >= r.
double interpolated_ap(std::span<const double> precision, std::span<const double> recall);

ApReport evaluate_ap(std::span<const EvalDetection> detections, const GroundTruthSet& gts,
                     IouKind kind, const EvalOptions& options = {});

}  // namespace protoseg

#endif  // PROTOSEG_EVAL_HPP_
