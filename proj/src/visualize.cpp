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
#include "protoseg/visualize.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "protoseg/errors.hpp"

namespace protoseg {
namespace {

constexpr int kGlyphWidth = 3;
constexpr int kGlyphHeight = 5;

// Rows of a 3x5 glyph, most significant of the low 3 bits is the left column.
std::array<std::uint8_t, kGlyphHeight> glyph(char c) {
  switch (c) {
    case '0': return {7, 5, 5, 5, 7};
    case '1': return {2, 6, 2, 2, 7};
    case '2': return {7, 1, 7, 4, 7};
    case '3': return {7, 1, 7, 1, 7};
    case '4': return {5, 5, 7, 1, 1};
    case '5': return {7, 4, 7, 1, 7};
    case '6': return {7, 4, 7, 5, 7};
    case '7': return {7, 1, 1, 1, 1};
    case '8': return {7, 5, 7, 5, 7};
    case '9': return {7, 5, 7, 1, 7};
    case '.': return {0, 0, 0, 0, 2};
    case '-': return {0, 0, 7, 0, 0};
    default: return {0, 0, 0, 0, 0};
  }
}

void put_pixel(RgbImage& image, long x, long y, Rgb color) {
  if (x < 0 || y < 0 || x >= static_cast<long>(image.width) ||
      y >= static_cast<long>(image.height)) {
    return;
  }
  std::uint8_t* p = image.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
  p[0] = color.r;
  p[1] = color.g;
  p[2] = color.b;
}

void draw_rect_outline(RgbImage& image, const Box& box, Rgb color) {
  const long x0 = std::lround(box.x1), y0 = std::lround(box.y1);
  const long x1 = std::lround(box.x2) - 1, y1 = std::lround(box.y2) - 1;
  if (x1 < x0 || y1 < y0) return;
  for (long x = x0; x <= x1; ++x) {
    put_pixel(image, x, y0, color);
    put_pixel(image, x, y1, color);
  }
  for (long y = y0; y <= y1; ++y) {
    put_pixel(image, x0, y, color);
    put_pixel(image, x1, y, color);
  }
}

}  // namespace

Rgb category_color(int category) {
  // Knuth multiplicative hash spread over three channels, kept away from black.
  const std::uint32_t h = static_cast<std::uint32_t>(category) * 2654435761u;
  return {static_cast<std::uint8_t>(64 + ((h >> 8) & 0xFF) % 192),
          static_cast<std::uint8_t>(64 + ((h >> 16) & 0xFF) % 192),
          static_cast<std::uint8_t>(64 + ((h >> 24) & 0xFF) % 192)};
}

Rgb blend(Rgb base, Rgb overlay, double alpha) {
  auto mix = [alpha](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround((1.0 - alpha) * a + alpha * b));
  };
  return {mix(base.r, overlay.r), mix(base.g, overlay.g), mix(base.b, overlay.b)};
}

void draw_text(RgbImage& image, int x, int y, const std::string& text, Rgb color) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto rows = glyph(text[i]);
    const int left = x + static_cast<int>(i) * (kGlyphWidth + 1);
    for (int r = 0; r < kGlyphHeight; ++r) {
      for (int c = 0; c < kGlyphWidth; ++c) {
        if (rows[r] & (1 << (kGlyphWidth - 1 - c))) put_pixel(image, left + c, y + r, color);
      }
    }
  }
}

RgbImage visualize(const RgbImage& image, std::span<const DetectionRecord> detections,
                   const VisualizeOptions& options) {
  for (const auto& d : detections) {
    if (d.mask.height != image.height || d.mask.width != image.width) {
      throw DimensionError("visualize: detection mask " + std::to_string(d.mask.height) + "x" +
                           std::to_string(d.mask.width) + " does not match image " +
                           std::to_string(image.height) + "x" + std::to_string(image.width));
    }
  }
  std::vector<const DetectionRecord*> shown;
  for (const auto& d : detections) {
    if (d.final_score >= options.score_threshold) shown.push_back(&d);
  }

  RgbImage out = image;
  for (auto it = shown.rbegin(); it != shown.rend(); ++it) {
    const DetectionRecord& d = **it;
    const Rgb color = category_color(d.category);
    const BinaryMask mask = rle_decode(d.mask);
    for (std::size_t y = 0; y < out.height; ++y) {
      for (std::size_t x = 0; x < out.width; ++x) {
        if (!mask.at(y, x)) continue;
        std::uint8_t* p = out.at(y, x);
        const Rgb mixed = blend({p[0], p[1], p[2]}, color, options.alpha);
        p[0] = mixed.r;
        p[1] = mixed.g;
        p[2] = mixed.b;
      }
    }
  }
  if (options.draw_boxes) {
    for (const auto* d : shown) draw_rect_outline(out, d->box, category_color(d->category));
  }
  if (options.draw_labels) {
    for (const auto* d : shown) {
      char text[16];
      std::snprintf(text, sizeof(text), "%.2f", d->final_score);
      const int x = static_cast<int>(std::lround(d->box.x1));
      int y = static_cast<int>(std::lround(d->box.y1)) - kGlyphHeight - 1;
      if (y < 0) y = static_cast<int>(std::lround(d->box.y1)) + 1;
      draw_text(out, x + 1, y, text, category_color(d->category));
    }
  }
  return out;
}

}  // namespace protoseg
