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
#include "protoseg/nms.hpp"

#include <algorithm>
#include <string>

#include "protoseg/errors.hpp"
#include "protoseg/numerics.hpp"

namespace protoseg {

void NmsConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw InputError("nms: iou_threshold must lie in (0, 1)");
  }
  if (top_n < 1) throw InputError("nms: top_n must be >= 1");
  if (max_total_detections < 1) {
    throw InputError("nms: max_total_detections must be >= 1");
  }
}

void ClassCandidates::validate() const {
  if (scores.size() != indices.size() || boxes.size() != indices.size()) {
    throw InputError("nms: candidate arrays of class " + std::to_string(class_id) +
                     " differ in length");
  }
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[i - 1]) {
      throw InputError("nms: scores of class " + std::to_string(class_id) +
                       " are not sorted descending");
    }
  }
}

ClasswiseDetections gather_candidates(const Tensor& class_scores,
                                      std::span<const Box> boxes,
                                      const NmsConfig& cfg) {
  cfg.validate();
  if (class_scores.rank() != 2 || class_scores.dim(0) != boxes.size()) {
    throw DimensionError("gather_candidates: scores " +
                         shape_to_string(class_scores.shape()) + " vs " +
                         std::to_string(boxes.size()) + " boxes");
  }
  const std::size_t n = class_scores.dim(0);
  const std::size_t classes = class_scores.dim(1);
  ClasswiseDetections out;
  std::vector<std::size_t> passing;
  std::vector<double> passing_scores;
  for (std::size_t c = 1; c < classes; ++c) {
    passing.clear();
    passing_scores.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double s = class_scores(i, c);
      if (s > cfg.pre_score_threshold) {
        passing.push_back(i);
        passing_scores.push_back(s);
      }
    }
    ClassCandidates cand;
    cand.class_id = static_cast<int>(c);
    const auto order = argsort_desc(passing_scores);
    const std::size_t keep =
        std::min(order.size(), static_cast<std::size_t>(cfg.top_n));
    for (std::size_t r = 0; r < keep; ++r) {
      const std::size_t i = passing[order[r]];
      cand.indices.push_back(i);
      cand.scores.push_back(passing_scores[order[r]]);
      cand.boxes.push_back(boxes[i]);
    }
    out.push_back(std::move(cand));
  }
  return out;
}

KeptPerClass traditional_nms(const ClasswiseDetections& dets, const NmsConfig& cfg) {
  cfg.validate();
  KeptPerClass kept(dets.size());
  std::vector<char> suppressed;
  for (std::size_t c = 0; c < dets.size(); ++c) {
    const ClassCandidates& cand = dets[c];
    cand.validate();
    const std::size_t n = cand.size();
    suppressed.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (suppressed[i]) continue;
      kept[c].push_back(cand.indices[i]);
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!suppressed[j] && iou(cand.boxes[i], cand.boxes[j]) > cfg.iou_threshold) {
          suppressed[j] = 1;
        }
      }
    }
  }
  return kept;
}

std::vector<double> max_suppressor_iou(std::span<const Box> boxes) {
  const std::size_t n = boxes.size();
  // Structure-of-arrays so the row sweep below is a straight-line loop.
  std::vector<double> x1(n), y1(n), x2(n), y2(n), area(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = boxes[i].x1;
    y1[i] = boxes[i].y1;
    x2[i] = boxes[i].x2;
    y2[i] = boxes[i].y2;
    area[i] = boxes[i].area();
  }
  std::vector<double> column_max(n, 0.0);
  const double* px1 = x1.data();
  const double* py1 = y1.data();
  const double* px2 = x2.data();
  const double* py2 = y2.data();
  const double* parea = area.data();
  double* pk = column_max.data();
  // Row i of the upper triangle is folded into the running column max.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ax1 = px1[i], ay1 = py1[i], ax2 = px2[i], ay2 = py2[i];
    const double aarea = parea[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double iw = std::min(ax2, px2[j]) - std::max(ax1, px1[j]);
      const double ih = std::min(ay2, py2[j]) - std::max(ay1, py1[j]);
      const double inter = std::max(iw, 0.0) * std::max(ih, 0.0);
      const double uni = aarea + parea[j] - inter;
      const double value = uni > 0.0 ? inter / uni : 0.0;
      pk[j] = std::max(pk[j], value);
    }
  }
  return column_max;
}

KeptPerClass fast_nms(const ClasswiseDetections& dets, const NmsConfig& cfg) {
  cfg.validate();
  KeptPerClass kept(dets.size());
  for (std::size_t c = 0; c < dets.size(); ++c) {
    const ClassCandidates& cand = dets[c];
    cand.validate();
    if (cand.size() > static_cast<std::size_t>(cfg.top_n)) {
      throw InputError("fast_nms: class " + std::to_string(cand.class_id) + " has " +
                       std::to_string(cand.size()) + " candidates, top_n is " +
                       std::to_string(cfg.top_n));
    }
    const auto column_max = max_suppressor_iou(cand.boxes);
    for (std::size_t j = 0; j < cand.size(); ++j) {
      if (column_max[j] <= cfg.iou_threshold) kept[c].push_back(cand.indices[j]);
    }
  }
  return kept;
}

KeptPerClass run_nms(const ClasswiseDetections& dets, const NmsConfig& cfg,
                     NmsKind kind) {
  return kind == NmsKind::kFast ? fast_nms(dets, cfg) : traditional_nms(dets, cfg);
}

std::vector<MergedDetection> merge_kept(const ClasswiseDetections& dets,
                                        const KeptPerClass& kept,
                                        const NmsConfig& cfg) {
  if (kept.size() != dets.size()) {
    throw DimensionError("merge_kept: kept sets do not align with classes");
  }
  std::vector<MergedDetection> all;
  for (std::size_t c = 0; c < dets.size(); ++c) {
    const ClassCandidates& cand = dets[c];
    std::size_t cursor = 0;
    for (std::size_t id : kept[c]) {
      // Kept ids appear in candidate order, so a forward scan finds them.
      while (cursor < cand.size() && cand.indices[cursor] != id) ++cursor;
      if (cursor == cand.size()) {
        throw InputError("merge_kept: kept id not among class candidates");
      }
      all.push_back({cand.class_id, id, cand.scores[cursor], cand.boxes[cursor]});
      ++cursor;
    }
  }
  std::vector<double> scores;
  scores.reserve(all.size());
  for (const auto& d : all) scores.push_back(d.score);
  const auto order = argsort_desc(scores);
  std::vector<MergedDetection> out;
  const std::size_t keep =
      std::min(order.size(), static_cast<std::size_t>(cfg.max_total_detections));
  out.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) out.push_back(all[order[r]]);
  return out;
}

}  // namespace protoseg
