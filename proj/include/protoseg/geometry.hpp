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
#ifndef PROTOSEG_GEOMETRY_HPP_
#define PROTOSEG_GEOMETRY_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "protoseg/tensor.hpp"

namespace protoseg {

struct CenterBox {
  double cx = 0, cy = 0, w = 0, h = 0;
};

// Axis-aligned rectangle in continuous pixel coordinates, x2 >= x1, y2 >= y1.
// Area is (x2 - x1) * (y2 - y1), no +1 convention.
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const { return x2 >= x1 && y2 >= y1; }

  CenterBox to_center() const;
  static Box from_center(const CenterBox& c);

  friend bool operator==(const Box&, const Box&) = default;
};

double iou(const Box& a, const Box& b);

// n x m matrix with out(i, j) == iou(a[i], b[j]).
Tensor pairwise_iou(std::span<const Box> a, std::span<const Box> b);

struct BoxVariances {
  double center = 0.1;
  double size = 0.2;
};

struct AnchorConfig {
  int input_size = 550;
  std::vector<int> level_strides{8, 16, 32, 64, 128};
  std::vector<double> base_scales{24, 48, 96, 192, 384};
  std::vector<double> aspect_ratios{1.0, 0.5, 2.0};
  std::vector<double> scales_per_level{1.0};
  BoxVariances variances;
  double scale_multiplier = 1.0;

  // Throws InputError if any invariant is violated.
  void validate() const;

  // Feature grid side for each level: ceil(input_size / stride).
  std::vector<int> grid_sizes() const;
  std::size_t anchors_per_cell() const {
    return aspect_ratios.size() * scales_per_level.size();
  }
  std::size_t anchor_count() const;

  // Published anchor variants.
  static AnchorConfig five_aspect_ratios();
  static AnchorConfig three_scales_per_level();
  static AnchorConfig pascal();
};

struct AnchorSet {
  std::vector<CenterBox> boxes;
  std::vector<int> level_of;
  int input_size = 0;

  std::size_t size() const { return boxes.size(); }
  std::vector<Box> corner_boxes() const;
};

// Enumerates level-major, then row-major over the grid, then scale, then
// aspect ratio. Anchors are not clipped to the image.
AnchorSet generate_anchors(const AnchorConfig& cfg);

// SSD-style decode without clamping. regressors is n x 4 (tx, ty, tw, th).
std::vector<Box> decode_boxes_unclamped(const AnchorSet& anchors,
                                        const Tensor& regressors,
                                        const BoxVariances& variances);

// decode_boxes_unclamped followed by clamping to [0, input_size].
std::vector<Box> decode_boxes(const AnchorSet& anchors, const Tensor& regressors,
                              const BoxVariances& variances);

// Inverse of decode_boxes_unclamped; gt_boxes holds one target per anchor.
Tensor encode_boxes(const AnchorSet& anchors, std::span<const Box> gt_boxes,
                    const BoxVariances& variances);

Box clamp_box(const Box& b, double width, double height);

}  // namespace protoseg

#endif  // PROTOSEG_GEOMETRY_HPP_
