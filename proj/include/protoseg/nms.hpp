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
#ifndef PROTOSEG_NMS_HPP_
#define PROTOSEG_NMS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "protoseg/geometry.hpp"
#include "protoseg/tensor.hpp"

namespace protoseg {

struct NmsConfig {
  double iou_threshold = 0.5;
  int top_n = 200;
  double pre_score_threshold = 0.05;
  int max_total_detections = 100;

  void validate() const;
};

enum class NmsKind { kFast, kTraditional };

// Candidates of one class, sorted by descending score. indices are the
// caller's identifiers (anchor indices in the pipeline).
struct ClassCandidates {
  int class_id = 0;
  std::vector<std::size_t> indices;
  std::vector<double> scores;
  std::vector<Box> boxes;

  std::size_t size() const { return indices.size(); }
  // Throws InputError if the arrays disagree in length or scores ascend.
  void validate() const;
};

using ClasswiseDetections = std::vector<ClassCandidates>;

// Kept identifiers per class, aligned with the input classes and in
// descending score order.
using KeptPerClass = std::vector<std::vector<std::size_t>>;

// Builds one candidate list per class. class_scores is n x (c + 1) with
// column 0 the background; class j of the output is column j. Only scores
// above pre_score_threshold survive, and at most top_n per class.
ClasswiseDetections gather_candidates(const Tensor& class_scores,
                                      std::span<const Box> boxes,
                                      const NmsConfig& cfg);

// Greedy sequential NMS: accept the best remaining detection, drop every
// lower-scored one overlapping it with IoU > threshold, repeat.
KeptPerClass traditional_nms(const ClasswiseDetections& dets, const NmsConfig& cfg);

// For sorted boxes, K[j] = max over i < j of IoU(i, j); 0 for j == 0. This is
// the column-wise max of the IoU matrix after zeroing the diagonal and lower
// triangle.
std::vector<double> max_suppressor_iou(std::span<const Box> boxes);

// Fast NMS: keep j iff K[j] <= threshold, so any higher-scored detection,
// kept or not, may suppress. Classes must hold at most top_n candidates.
KeptPerClass fast_nms(const ClasswiseDetections& dets, const NmsConfig& cfg);

KeptPerClass run_nms(const ClasswiseDetections& dets, const NmsConfig& cfg,
                     NmsKind kind);

struct MergedDetection {
  int class_id = 0;
  std::size_t index = 0;
  double score = 0;
  Box box;
};

// Flattens the per-class survivors, sorts by score (ties keep class-major
// order) and truncates to max_total_detections.
std::vector<MergedDetection> merge_kept(const ClasswiseDetections& dets,
                                        const KeptPerClass& kept,
                                        const NmsConfig& cfg);

}  // namespace protoseg

#endif  // PROTOSEG_NMS_HPP_
