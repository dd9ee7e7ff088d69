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
#include "protoseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "protoseg/errors.hpp"
#include "protoseg/numerics.hpp"

namespace protoseg {

void GroundTruthSet::validate() const {
  for (const auto& a : annotations) {
    const GtImage* img = find_image(a.image_id);
    if (!img) {
      throw InputError("gt annotation " + std::to_string(a.id) + " refers to unknown image " +
                       std::to_string(a.image_id));
    }
    if (!a.mask.data.empty() && (a.mask.height != img->height || a.mask.width != img->width)) {
      throw InputError("gt annotation " + std::to_string(a.id) +
                       " mask does not match its image size");
    }
  }
}

const GtImage* GroundTruthSet::find_image(int id) const {
  for (const auto& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  // Built from integer percentages so 0.6, 0.75, ... are the nearest doubles.
  for (int pct = 50; pct <= 95; pct += 5) t.push_back(pct / 100.0);
  return t;
}

double interpolated_ap(std::span<const double> precision, std::span<const double> recall) {
  if (precision.size() != recall.size()) {
    throw DimensionError("interpolated_ap: precision and recall differ in length");
  }
  std::vector<double> envelope(precision.begin(), precision.end());
  for (std::size_t i = envelope.size(); i-- > 1;) {
    envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
  }
  double total = 0.0;
  for (int step = 0; step <= 100; ++step) {
    const double r = step / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) total += envelope[static_cast<std::size_t>(it - recall.begin())];
  }
  return total / 101.0;
}

namespace {

struct AreaRange {
  double lo, hi;
  bool outside(double area) const { return area < lo || area > hi; }
};

constexpr AreaRange kAllAreas{0.0, std::numeric_limits<double>::infinity()};
constexpr AreaRange kSmall{0.0, 32.0 * 32.0};
constexpr AreaRange kMedium{32.0 * 32.0, 96.0 * 96.0};
constexpr AreaRange kLarge{96.0 * 96.0, std::numeric_limits<double>::infinity()};

double region_area(const Box& box, const BinaryMask& mask, IouKind kind) {
  if (kind == IouKind::kMask && !mask.data.empty()) return static_cast<double>(mask.area());
  return box.area();
}

// Detections and ground truth of one category, with det-vs-gt overlaps
// restricted to pairs from the same image.
struct CategoryProblem {
  std::vector<std::size_t> dets;  // descending score
  std::vector<std::size_t> gts;
  std::vector<std::vector<std::pair<std::size_t, double>>> overlaps;  // per det: (gt slot, iou)
  std::vector<double> det_areas;
  std::vector<double> gt_areas;
};

// AP of one category at one threshold, or nullopt without any gt in range.
std::optional<double> category_ap(const CategoryProblem& prob, double threshold,
                                  const AreaRange& range) {
  std::vector<char> gt_ignored(prob.gts.size());
  std::size_t counted = 0;
  for (std::size_t g = 0; g < prob.gts.size(); ++g) {
    gt_ignored[g] = range.outside(prob.gt_areas[g]);
    counted += !gt_ignored[g];
  }
  if (counted == 0) return std::nullopt;

  std::vector<char> gt_taken(prob.gts.size(), 0);
  std::vector<double> precision, recall;
  std::size_t tp = 0, fp = 0;
  for (std::size_t d = 0; d < prob.dets.size(); ++d) {
    // Highest-IoU free gt at or above threshold, preferring gts in range.
    std::ptrdiff_t match = -1;
    double best = threshold;
    bool match_ignored = true;
    for (const auto& [g, value] : prob.overlaps[d]) {
      if (gt_taken[g] || value < threshold) continue;
      const bool ignored = gt_ignored[g] != 0;
      const bool better = match < 0 || (match_ignored && !ignored) ||
                          (ignored == match_ignored && value > best);
      if (better) {
        match = static_cast<std::ptrdiff_t>(g);
        best = value;
        match_ignored = ignored;
      }
    }
    bool skip;
    if (match >= 0) {
      gt_taken[static_cast<std::size_t>(match)] = 1;
      skip = match_ignored;
      if (!skip) ++tp;
    } else {
      skip = range.outside(prob.det_areas[d]);
      if (!skip) ++fp;
    }
    if (skip) continue;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(counted));
  }
  return interpolated_ap(precision, recall);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

ApReport evaluate_ap(std::span<const EvalDetection> detections, const GroundTruthSet& gts,
                     IouKind kind, const EvalOptions& options) {
  ApReport report;
  report.thresholds =
      options.thresholds.empty() ? coco_iou_thresholds() : options.thresholds;
  for (double t : report.thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("evaluate_ap: thresholds must lie in (0, 1]");
  }

  // Keep the top detections of every image.
  std::unordered_map<int, std::vector<std::size_t>> per_image;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    per_image[detections[i].image_id].push_back(i);
  }
  std::vector<char> admitted(detections.size(), 0);
  for (auto& [image, ids] : per_image) {
    std::vector<double> scores;
    for (std::size_t i : ids) scores.push_back(detections[i].score);
    const auto order = argsort_desc(scores);
    const std::size_t keep = std::min(order.size(), options.max_detections_per_image);
    for (std::size_t r = 0; r < keep; ++r) admitted[ids[order[r]]] = 1;
  }

  std::set<int> categories;
  for (const auto& a : gts.annotations) categories.insert(a.category_id);
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (admitted[i]) categories.insert(detections[i].category_id);
  }

  std::vector<double> all_scores;
  all_scores.reserve(detections.size());
  for (const auto& d : detections) all_scores.push_back(d.score);
  const auto global_order = argsort_desc(all_scores);

  std::vector<AreaRange> ranges{kAllAreas};
  if (options.area_breakdown) ranges.insert(ranges.end(), {kSmall, kMedium, kLarge});
  std::vector<std::vector<double>> range_values(ranges.size());
  std::vector<double> ap50_values, ap75_values;

  for (int cat : categories) {
    CategoryProblem prob;
    for (std::size_t g = 0; g < gts.annotations.size(); ++g) {
      const auto& a = gts.annotations[g];
      if (a.category_id != cat) continue;
      prob.gts.push_back(g);
      prob.gt_areas.push_back(region_area(a.box, a.mask, kind));
    }
    for (std::size_t i : global_order) {
      if (!admitted[i] || detections[i].category_id != cat) continue;
      const EvalDetection& det = detections[i];
      prob.dets.push_back(i);
      prob.det_areas.push_back(region_area(det.box, det.mask, kind));
      auto& row = prob.overlaps.emplace_back();
      for (std::size_t slot = 0; slot < prob.gts.size(); ++slot) {
        const auto& a = gts.annotations[prob.gts[slot]];
        if (a.image_id != det.image_id) continue;
        const double value =
            kind == IouKind::kBox ? iou(det.box, a.box) : mask_iou(det.mask, a.mask);
        row.emplace_back(slot, value);
      }
    }

    if (prob.gts.empty()) {
      // Detections of a category absent from the ground truth.
      report.per_class[cat] = 0.0;
      report.per_class_per_threshold[cat].assign(report.thresholds.size(), 0.0);
      continue;
    }

    for (std::size_t r = 0; r < ranges.size(); ++r) {
      std::vector<double> per_threshold;
      for (double t : report.thresholds) {
        if (auto ap = category_ap(prob, t, ranges[r])) per_threshold.push_back(*ap);
      }
      if (per_threshold.empty()) continue;
      range_values[r].push_back(mean_of(per_threshold));
      if (r == 0) {
        report.per_class[cat] = range_values[r].back();
        report.per_class_per_threshold[cat] = per_threshold;
      }
    }
    ap50_values.push_back(category_ap(prob, 0.5, kAllAreas).value());
    ap75_values.push_back(category_ap(prob, 0.75, kAllAreas).value());
  }

  report.ap = mean_of(range_values[0]);
  report.ap50 = mean_of(ap50_values);
  report.ap75 = mean_of(ap75_values);
  if (options.area_breakdown) {
    auto pick = [&](std::size_t r) -> std::optional<double> {
      if (range_values[r].empty()) return std::nullopt;
      return mean_of(range_values[r]);
    };
    report.ap_small = pick(1);
    report.ap_medium = pick(2);
    report.ap_large = pick(3);
  }
  return report;
}

}  // namespace protoseg
