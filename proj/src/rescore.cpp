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
#include "protoseg/rescore.hpp"

#include <algorithm>
#include <cmath>

#include "protoseg/errors.hpp"
#include "protoseg/numerics.hpp"

namespace protoseg {

OracleGtIouPredictor::OracleGtIouPredictor(std::vector<BinaryMask> gt_masks,
                                           std::vector<int> gt_classes, double threshold)
    : gt_masks_(std::move(gt_masks)), gt_classes_(std::move(gt_classes)),
      threshold_(threshold) {
  if (gt_masks_.size() != gt_classes_.size()) {
    throw InputError("OracleGtIouPredictor: masks and classes differ in length");
  }
}

double OracleGtIouPredictor::predict(const Tensor& cropped_soft_mask, int class_id) const {
  double best = 0.0;
  for (std::size_t g = 0; g < gt_masks_.size(); ++g) {
    if (gt_classes_[g] != class_id) continue;
    const BinaryMask& gt = gt_masks_[g];
    const BinaryMask pred =
        binarize(resize_bilinear(cropped_soft_mask, gt.height, gt.width), threshold_);
    best = std::max(best, mask_iou(pred, gt));
  }
  return best;
}

RescoreResult rescore_detections(std::vector<Detection> detections,
                                 const IouPredictor& predictor) {
  RescoreResult result;
  std::vector<double> finals;
  finals.reserve(detections.size());
  for (auto& d : detections) {
    double predicted = predictor.predict(d.soft_mask, d.class_id);
    if (std::isnan(predicted) || predicted < 0.0 || predicted > 1.0) {
      ++result.clamped;
      predicted = std::isnan(predicted) ? 0.0 : std::clamp(predicted, 0.0, 1.0);
    }
    d.final_score = d.score * predicted;
    finals.push_back(d.final_score);
  }
  result.detections.reserve(detections.size());
  for (std::size_t i : argsort_desc(finals)) {
    result.detections.push_back(std::move(detections[i]));
  }
  return result;
}

}  // namespace protoseg
