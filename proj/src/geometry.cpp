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
#include "protoseg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "protoseg/errors.hpp"

namespace protoseg {

CenterBox Box::to_center() const {
  return {(x1 + x2) * 0.5, (y1 + y2) * 0.5, x2 - x1, y2 - y1};
}

Box Box::from_center(const CenterBox& c) {
  return {c.cx - c.w * 0.5, c.cy - c.h * 0.5, c.cx + c.w * 0.5, c.cy + c.h * 0.5};
}

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Tensor pairwise_iou(std::span<const Box> a, std::span<const Box> b) {
  if (a.empty() || b.empty()) {
    throw DimensionError("pairwise_iou: both box lists must be non-empty");
  }
  Tensor out({a.size(), b.size()});
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) = iou(a[i], b[j]);
  }
  return out;
}

void AnchorConfig::validate() const {
  if (input_size <= 0) throw InputError("anchors: input_size must be > 0");
  if (level_strides.empty()) throw InputError("anchors: no FPN levels");
  if (base_scales.size() != level_strides.size()) {
    throw InputError("anchors: base_scales and level_strides differ in length");
  }
  if (aspect_ratios.empty() || scales_per_level.empty()) {
    throw InputError("anchors: aspect_ratios and scales_per_level must be non-empty");
  }
  auto positive = [](auto const& values) {
    return std::all_of(values.begin(), values.end(), [](auto v) { return v > 0; });
  };
  if (!positive(level_strides) || !positive(base_scales) ||
      !positive(aspect_ratios) || !positive(scales_per_level)) {
    throw InputError("anchors: strides, scales and ratios must be > 0");
  }
  if (!(variances.center > 0) || !(variances.size > 0) || !(scale_multiplier > 0)) {
    throw InputError("anchors: variances and scale_multiplier must be > 0");
  }
}

std::vector<int> AnchorConfig::grid_sizes() const {
  std::vector<int> grids;
  grids.reserve(level_strides.size());
  for (int s : level_strides) grids.push_back((input_size + s - 1) / s);
  return grids;
}

std::size_t AnchorConfig::anchor_count() const {
  std::size_t cells = 0;
  for (int g : grid_sizes()) cells += static_cast<std::size_t>(g) * g;
  return cells * anchors_per_cell();
}

AnchorConfig AnchorConfig::five_aspect_ratios() {
  AnchorConfig cfg;
  cfg.aspect_ratios = {1.0, 0.5, 2.0, 1.0 / 3.0, 3.0};
  return cfg;
}

AnchorConfig AnchorConfig::three_scales_per_level() {
  AnchorConfig cfg;
  cfg.scales_per_level = {1.0, std::pow(2.0, 1.0 / 3.0), std::pow(2.0, 2.0 / 3.0)};
  return cfg;
}

AnchorConfig AnchorConfig::pascal() {
  AnchorConfig cfg;
  cfg.scale_multiplier = 4.0 / 3.0;
  return cfg;
}

std::vector<Box> AnchorSet::corner_boxes() const {
  std::vector<Box> out;
  out.reserve(boxes.size());
  for (const auto& c : boxes) out.push_back(Box::from_center(c));
  return out;
}

AnchorSet generate_anchors(const AnchorConfig& cfg) {
  cfg.validate();
  AnchorSet set;
  set.input_size = cfg.input_size;
  set.boxes.reserve(cfg.anchor_count());
  set.level_of.reserve(cfg.anchor_count());
  const auto grids = cfg.grid_sizes();
  for (std::size_t level = 0; level < grids.size(); ++level) {
    const double stride = cfg.level_strides[level];
    const double base = cfg.base_scales[level] * cfg.scale_multiplier;
    for (int row = 0; row < grids[level]; ++row) {
      for (int col = 0; col < grids[level]; ++col) {
        const double cx = (col + 0.5) * stride;
        const double cy = (row + 0.5) * stride;
        for (double scale : cfg.scales_per_level) {
          for (double ratio : cfg.aspect_ratios) {
            const double root = std::sqrt(ratio);
            set.boxes.push_back({cx, cy, base * scale * root, base * scale / root});
            set.level_of.push_back(static_cast<int>(level));
          }
        }
      }
    }
  }
  return set;
}

namespace {

void check_regressor_shape(const AnchorSet& anchors, const Tensor& regressors) {
  if (regressors.rank() != 2 || regressors.dim(1) != 4 ||
      regressors.dim(0) != anchors.size()) {
    throw DimensionError("decode_boxes: regressors " +
                         shape_to_string(regressors.shape()) + " do not match " +
                         std::to_string(anchors.size()) + " anchors");
  }
}

}  // namespace

std::vector<Box> decode_boxes_unclamped(const AnchorSet& anchors,
                                        const Tensor& regressors,
                                        const BoxVariances& variances) {
  check_regressor_shape(anchors, regressors);
  const double max_exp_arg = std::log(std::numeric_limits<double>::max());
  std::vector<Box> out;
  out.reserve(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const CenterBox& a = anchors.boxes[i];
    const auto t = regressors.slice(i);
    if (!std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); })) {
      throw NumericError("decode_boxes: non-finite regressor at index " +
                         std::to_string(i));
    }
    const double sw = t[2] * variances.size, sh = t[3] * variances.size;
    if (sw > max_exp_arg || sh > max_exp_arg) {
      throw NumericError("decode_boxes: exp overflow at index " + std::to_string(i));
    }
    CenterBox c{a.cx + t[0] * variances.center * a.w,
                a.cy + t[1] * variances.center * a.h, a.w * std::exp(sw),
                a.h * std::exp(sh)};
    const Box b = Box::from_center(c);
    if (!std::isfinite(b.x1) || !std::isfinite(b.x2) || !std::isfinite(b.y1) ||
        !std::isfinite(b.y2)) {
      throw NumericError("decode_boxes: exp overflow at index " + std::to_string(i));
    }
    out.push_back(b);
  }
  return out;
}

Box clamp_box(const Box& b, double width, double height) {
  auto clamp = [](double v, double hi) { return std::clamp(v, 0.0, hi); };
  return {clamp(b.x1, width), clamp(b.y1, height), clamp(b.x2, width),
          clamp(b.y2, height)};
}

std::vector<Box> decode_boxes(const AnchorSet& anchors, const Tensor& regressors,
                              const BoxVariances& variances) {
  auto boxes = decode_boxes_unclamped(anchors, regressors, variances);
  const double side = anchors.input_size;
  for (auto& b : boxes) b = clamp_box(b, side, side);
  return boxes;
}

Tensor encode_boxes(const AnchorSet& anchors, std::span<const Box> gt_boxes,
                    const BoxVariances& variances) {
  if (gt_boxes.size() != anchors.size() || anchors.size() == 0) {
    throw DimensionError("encode_boxes: need one gt box per anchor, got " +
                         std::to_string(gt_boxes.size()) + " for " +
                         std::to_string(anchors.size()) + " anchors");
  }
  Tensor out({anchors.size(), 4});
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const CenterBox& a = anchors.boxes[i];
    const CenterBox g = gt_boxes[i].to_center();
    if (!(g.w > 0.0) || !(g.h > 0.0)) {
      throw InputError("encode_boxes: zero-area gt box at index " + std::to_string(i));
    }
    out(i, 0) = (g.cx - a.cx) / (variances.center * a.w);
    out(i, 1) = (g.cy - a.cy) / (variances.center * a.h);
    out(i, 2) = std::log(g.w / a.w) / variances.size;
    out(i, 3) = std::log(g.h / a.h) / variances.size;
  }
  return out;
}

}  // namespace protoseg
