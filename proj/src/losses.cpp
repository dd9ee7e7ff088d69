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
#include "protoseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "protoseg/errors.hpp"
#include "protoseg/numerics.hpp"

namespace protoseg {

void LossWeights::validate() const {
  if (!(cls > 0) || !(box > 0) || !(mask > 0) || !(sem > 0)) {
    throw InputError("loss weights must all be > 0");
  }
}

std::size_t MatchResult::num_positive() const {
  return std::count_if(anchors.begin(), anchors.end(),
                       [](const AnchorMatch& m) { return m.kind == MatchKind::kPositive; });
}

std::size_t MatchResult::num_negative() const {
  return std::count_if(anchors.begin(), anchors.end(),
                       [](const AnchorMatch& m) { return m.kind == MatchKind::kNegative; });
}

MatchResult match_anchors(const AnchorSet& anchors, std::span<const Box> gt_boxes,
                          double pos_thresh, double neg_thresh) {
  if (neg_thresh > pos_thresh) {
    throw InputError("match_anchors: neg_thresh must not exceed pos_thresh");
  }
  MatchResult result;
  result.anchors.resize(anchors.size());
  if (gt_boxes.empty()) return result;

  const auto boxes = anchors.corner_boxes();
  std::vector<double> best_for_gt(gt_boxes.size(), -1.0);
  std::vector<std::size_t> best_anchor(gt_boxes.size(), 0);
  for (std::size_t a = 0; a < boxes.size(); ++a) {
    AnchorMatch& m = result.anchors[a];
    for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
      const double v = iou(boxes[a], gt_boxes[g]);
      if (v > m.max_iou || m.gt_index < 0) {
        m.max_iou = v;
        m.gt_index = static_cast<int>(g);
      }
      if (v > best_for_gt[g]) {
        best_for_gt[g] = v;
        best_anchor[g] = a;
      }
    }
    if (m.max_iou > pos_thresh) {
      m.kind = MatchKind::kPositive;
    } else if (m.max_iou < neg_thresh) {
      m.kind = MatchKind::kNegative;
      m.gt_index = -1;
    } else {
      m.kind = MatchKind::kIgnored;
      m.gt_index = -1;
    }
  }
  for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
    if (!(best_for_gt[g] > 0.0)) continue;
    AnchorMatch& m = result.anchors[best_anchor[g]];
    m.kind = MatchKind::kPositive;
    m.gt_index = static_cast<int>(g);
    m.max_iou = best_for_gt[g];
  }
  return result;
}

namespace {

double log_sum_exp(std::span<const double> row) {
  const double peak = *std::max_element(row.begin(), row.end());
  double total = 0.0;
  for (double v : row) total += std::exp(v - peak);
  return peak + std::log(total);
}

}  // namespace

ClassificationLoss classification_loss(const Tensor& logits, const MatchResult& matches,
                                       std::span<const int> gt_classes,
                                       const LossWeights& weights, int neg_pos_ratio) {
  weights.validate();
  if (logits.rank() != 2 || logits.dim(0) != matches.anchors.size() || logits.dim(1) < 2) {
    throw DimensionError("classification_loss: logits " +
                         shape_to_string(logits.shape()) + " vs " +
                         std::to_string(matches.anchors.size()) + " anchors");
  }
  if (neg_pos_ratio < 1) throw InputError("classification_loss: neg_pos_ratio must be >= 1");
  const auto num_classes = static_cast<int>(logits.dim(1)) - 1;

  ClassificationLoss out;
  double total = 0.0;
  std::vector<std::size_t> negatives;
  std::vector<double> negative_losses;
  for (std::size_t a = 0; a < matches.anchors.size(); ++a) {
    const AnchorMatch& m = matches.anchors[a];
    const auto row = logits.slice(a);
    if (m.kind == MatchKind::kPositive) {
      if (m.gt_index < 0 || static_cast<std::size_t>(m.gt_index) >= gt_classes.size()) {
        throw InputError("classification_loss: positive anchor without gt class");
      }
      const int target = gt_classes[m.gt_index];
      if (target < 1 || target > num_classes) {
        throw InputError("classification_loss: gt class " + std::to_string(target) +
                         " outside [1, " + std::to_string(num_classes) + "]");
      }
      total += log_sum_exp(row) - row[target];
      ++out.num_positive;
    } else if (m.kind == MatchKind::kNegative) {
      negatives.push_back(a);
      negative_losses.push_back(log_sum_exp(row) - row[0]);
    }
  }

  const std::size_t wanted =
      static_cast<std::size_t>(neg_pos_ratio) * std::max<std::size_t>(out.num_positive, 1);
  const std::size_t take = std::min(wanted, negatives.size());
  const auto order = argsort_desc(negative_losses);
  for (std::size_t r = 0; r < take; ++r) {
    out.selected_negatives.push_back(negatives[order[r]]);
    total += negative_losses[order[r]];
  }
  const std::size_t selected = out.num_positive + take;
  out.value = selected == 0 ? 0.0 : weights.cls * total / static_cast<double>(selected);
  return out;
}

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * a * a : a - 0.5;
}

double box_loss(const Tensor& predicted, const Tensor& encoded_gt,
                const MatchResult& matches, const LossWeights& weights) {
  weights.validate();
  if (predicted.shape() != encoded_gt.shape() || predicted.rank() != 2 ||
      predicted.dim(1) != 4 || predicted.dim(0) != matches.anchors.size()) {
    throw DimensionError("box_loss: predicted " + shape_to_string(predicted.shape()) +
                         " vs encoded " + shape_to_string(encoded_gt.shape()));
  }
  double total = 0.0;
  std::size_t positives = 0;
  for (std::size_t a = 0; a < matches.anchors.size(); ++a) {
    if (matches.anchors[a].kind != MatchKind::kPositive) continue;
    ++positives;
    for (std::size_t t = 0; t < 4; ++t) total += smooth_l1(predicted(a, t) - encoded_gt(a, t));
  }
  return positives == 0 ? 0.0 : weights.box * total / static_cast<double>(positives);
}

double bce_with_logits(double logit, double target) {
  return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

MaskLossResult mask_loss(const Tensor& prototypes, const Tensor& coefficients,
                         std::span<const BinaryMask> gt_masks,
                         std::span<const Box> gt_boxes, const LossWeights& weights) {
  weights.validate();
  if (prototypes.rank() != 3 || coefficients.rank() != 2 ||
      prototypes.dim(2) != coefficients.dim(1)) {
    throw DimensionError("mask_loss: prototypes " + shape_to_string(prototypes.shape()) +
                         " vs coefficients " + shape_to_string(coefficients.shape()));
  }
  const std::size_t h = prototypes.dim(0), w = prototypes.dim(1), k = prototypes.dim(2);
  const std::size_t p = coefficients.dim(0);
  if (gt_masks.size() != p || gt_boxes.size() != p) {
    throw DimensionError("mask_loss: need one gt mask and box per positive");
  }
  for (const auto& m : gt_masks) {
    if (m.height != h || m.width != w) {
      throw DimensionError("mask_loss: gt masks must be at prototype resolution");
    }
  }

  MaskLossResult out;
  out.grad_coefficients = Tensor({p, k});
  out.grad_prototypes = Tensor({h, w, k});
  out.per_instance.assign(p, 0.0);

  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < p; ++i) {
    if (gt_boxes[i].area() > 0.0) {
      valid.push_back(i);
    } else {
      ++out.skipped;
    }
  }
  if (valid.empty()) return out;
  const double scale = weights.mask / static_cast<double>(valid.size());

  const double* proto = prototypes.data().data();
  for (std::size_t i : valid) {
    const double area = gt_boxes[i].area();
    const PixelRegion region = box_region(gt_boxes[i], static_cast<double>(w),
                                          static_cast<double>(h), w, h, 0);
    const auto coeff = coefficients.slice(i);
    auto grad_c = out.grad_coefficients.slice(i);
    double sum = 0.0;
    for (std::size_t y = region.y0; y < region.y1; ++y) {
      for (std::size_t x = region.x0; x < region.x1; ++x) {
        const double* pix = proto + (y * w + x) * k;
        double logit = 0.0;
        for (std::size_t t = 0; t < k; ++t) logit += pix[t] * coeff[t];
        const double target = gt_masks[i].at(y, x) ? 1.0 : 0.0;
        sum += bce_with_logits(logit, target);
        const double g = (sigmoid(logit) - target) / area * scale;
        double* grad_p = &out.grad_prototypes(y, x, 0);
        for (std::size_t t = 0; t < k; ++t) {
          grad_c[t] += g * pix[t];
          grad_p[t] += g * coeff[t];
        }
      }
    }
    out.per_instance[i] = sum / area;
    out.value += out.per_instance[i];
  }
  out.value *= scale;
  return out;
}

Tensor build_semantic_targets(std::span<const BinaryMask> gt_masks,
                              std::span<const int> gt_classes, int num_classes,
                              std::size_t out_height, std::size_t out_width) {
  if (gt_masks.size() != gt_classes.size()) {
    throw DimensionError("build_semantic_targets: masks and classes differ in length");
  }
  if (num_classes < 1) throw InputError("build_semantic_targets: need at least one class");
  Tensor targets({static_cast<std::size_t>(num_classes), out_height, out_width});
  for (std::size_t i = 0; i < gt_masks.size(); ++i) {
    const int cls = gt_classes[i];
    if (cls < 1 || cls > num_classes) {
      throw InputError("build_semantic_targets: class " + std::to_string(cls) +
                       " outside [1, " + std::to_string(num_classes) + "]");
    }
    const BinaryMask pooled = downsample_max(gt_masks[i], out_height, out_width);
    auto channel = targets.slice(static_cast<std::size_t>(cls - 1));
    for (std::size_t p = 0; p < pooled.data.size(); ++p) {
      if (pooled.data[p]) channel[p] = 1.0;
    }
  }
  return targets;
}

double semantic_loss(const Tensor& logits, const Tensor& targets,
                     const LossWeights& weights) {
  weights.validate();
  if (logits.shape() != targets.shape()) {
    throw DimensionError("semantic_loss: logits " + shape_to_string(logits.shape()) +
                         " vs targets " + shape_to_string(targets.shape()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += bce_with_logits(logits[i], targets[i]);
  return weights.sem * total / static_cast<double>(logits.size());
}

}  // namespace protoseg
