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
#ifndef PROTOSEG_RESCORE_HPP_
#define PROTOSEG_RESCORE_HPP_

#include <cstddef>
#include <vector>

#include "protoseg/geometry.hpp"
#include "protoseg/maskops.hpp"
#include "protoseg/tensor.hpp"

namespace protoseg {

// One detection of one image as it moves through post-processing.
struct Detection {
  int class_id = 0;
  double score = 0;
  double final_score = 0;
  Box box;
  std::size_t anchor_index = 0;
  Tensor soft_mask;  // cropped, before thresholding
  BinaryMask mask;   // final binary mask at image resolution
};

// Predicts the mask IoU of a cropped soft mask for its class. Implementations
// must be safe to call concurrently.
class IouPredictor {
 public:
  virtual ~IouPredictor() = default;
  virtual double predict(const Tensor& cropped_soft_mask, int class_id) const = 0;
};

// Always 1, which leaves scores and ranking as they are.
class ConstantOnePredictor final : public IouPredictor {
 public:
  double predict(const Tensor&, int) const override { return 1.0; }
};

// Reports the true mask IoU against the best-matching ground truth of the
// same class. The soft mask is resized to the gt size and binarized first.
class OracleGtIouPredictor final : public IouPredictor {
 public:
  OracleGtIouPredictor(std::vector<BinaryMask> gt_masks, std::vector<int> gt_classes,
                       double threshold = 0.5);
  double predict(const Tensor& cropped_soft_mask, int class_id) const override;

 private:
  std::vector<BinaryMask> gt_masks_;
  std::vector<int> gt_classes_;
  double threshold_;
};

struct RescoreResult {
  std::vector<Detection> detections;
  // Predictions that fell outside [0, 1] and were clamped.
  std::size_t clamped = 0;
};

// final_score = score * predicted IoU, then a stable re-sort on final_score.
// Boxes and masks are carried over untouched.
RescoreResult rescore_detections(std::vector<Detection> detections,
                                 const IouPredictor& predictor);

}  // namespace protoseg

#endif  // PROTOSEG_RESCORE_HPP_
