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
#ifndef PROTOSEG_LOSSES_HPP_
#define PROTOSEG_LOSSES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "protoseg/geometry.hpp"
#include "protoseg/maskops.hpp"
#include "protoseg/tensor.hpp"

namespace protoseg {

struct LossWeights {
  double cls = 1.0;
  double box = 1.5;
  double mask = 6.125;
  double sem = 1.0;

  void validate() const;
};

enum class MatchKind { kNegative, kPositive, kIgnored };

struct AnchorMatch {
  MatchKind kind = MatchKind::kNegative;
  int gt_index = -1;
  double max_iou = 0;
};

struct MatchResult {
  std::vector<AnchorMatch> anchors;

  std::size_t num_positive() const;
  std::size_t num_negative() const;
};

// An anchor is positive (to its argmax gt) when its best IoU exceeds
// pos_thresh, negative below neg_thresh, ignored in between. Each gt's best
// anchor is then forced positive to that gt. Anchors are matched unclipped.
MatchResult match_anchors(const AnchorSet& anchors, std::span<const Box> gt_boxes,
                          double pos_thresh = 0.5, double neg_thresh = 0.4);

struct ClassificationLoss {
  double value = 0;
  std::size_t num_positive = 0;
  // Hard negatives picked by OHEM, highest background loss first.
  std::vector<std::size_t> selected_negatives;
};

// Softmax cross entropy over n x (c + 1) logits (column 0 is background).
// Positives take target gt_classes[gt_index] in [1, c]; negatives are mined
// at neg_pos_ratio per positive, or neg_pos_ratio in total with no positives.
// The loss is the mean over the selected anchors times weights.cls.
ClassificationLoss classification_loss(const Tensor& logits, const MatchResult& matches,
                                       std::span<const int> gt_classes,
                                       const LossWeights& weights,
                                       int neg_pos_ratio = 3);

double smooth_l1(double x);

// Smooth-L1 summed over the 4 coordinates of every positive anchor, divided
// by the positive count, times weights.box.
double box_loss(const Tensor& predicted, const Tensor& encoded_gt,
                const MatchResult& matches, const LossWeights& weights);

// Numerically stable BCE of sigmoid(logit) against target.
double bce_with_logits(double logit, double target);

struct MaskLossResult {
  double value = 0;
  // Unweighted BCE sum inside each gt box divided by that box's area.
  std::vector<double> per_instance;
  Tensor grad_coefficients;  // p x k
  Tensor grad_prototypes;    // h x w x k
  std::size_t skipped = 0;   // zero-area gt boxes
};

// Mask loss on positives. prototypes is h x w x k, coefficients p x k,
// gt_masks and gt_boxes are at prototype resolution. Each instance's BCE is
// summed over pixels inside its gt box, divided by the box area, then the
// instances are averaged and scaled by weights.mask.
MaskLossResult mask_loss(const Tensor& prototypes, const Tensor& coefficients,
                         std::span<const BinaryMask> gt_masks,
                         std::span<const Box> gt_boxes, const LossWeights& weights);

// c x out_h x out_w multi-hot targets: channel (class - 1) is 1 wherever an
// instance of that class covers the max-pooled pixel. Classes are 1-based.
Tensor build_semantic_targets(std::span<const BinaryMask> gt_masks,
                              std::span<const int> gt_classes, int num_classes,
                              std::size_t out_height, std::size_t out_width);

// Per-element sigmoid BCE averaged over c x h x w, times weights.sem.
double semantic_loss(const Tensor& logits, const Tensor& targets,
                     const LossWeights& weights);

}  // namespace protoseg

#endif  // PROTOSEG_LOSSES_HPP_
