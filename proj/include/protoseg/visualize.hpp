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
#ifndef PROTOSEG_VISUALIZE_HPP_
#define PROTOSEG_VISUALIZE_HPP_

#include <cstdint>
#include <span>
#include <string>

#include "protoseg/dataset_io.hpp"
#include "protoseg/image_io.hpp"

namespace protoseg {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Fixed color for a category id.
Rgb category_color(int category);

// round((1 - alpha) * base + alpha * overlay), channel by channel.
Rgb blend(Rgb base, Rgb overlay, double alpha);

struct VisualizeOptions {
  double score_threshold = 0.3;
  double alpha = 0.45;
  bool draw_boxes = true;
  bool draw_labels = true;
};

// Overlays detections whose final_score >= score_threshold: mask tint first
// (lowest-ranked underneath), then 1 px box outlines, then score labels.
// Throws DimensionError if any detection mask differs from the image size.
RgbImage visualize(const RgbImage& image, std::span<const DetectionRecord> detections,
                   const VisualizeOptions& options = {});

// Renders text with a 3x5 pixel font; digits, '.', and '-' are supported,
// anything else is left blank.
void draw_text(RgbImage& image, int x, int y, const std::string& text, Rgb color);

}  // namespace protoseg

#endif  // PROTOSEG_VISUALIZE_HPP_
