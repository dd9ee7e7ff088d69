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
#include "protoseg/maskops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "protoseg/errors.hpp"
#include "protoseg/numerics.hpp"

namespace protoseg {

PrototypeStack::PrototypeStack(Tensor tensor, bool enforce_relu)
    : tensor_(std::move(tensor)) {
  if (tensor_.rank() != 3) {
    throw DimensionError("prototypes must be h x w x k, got " +
                         shape_to_string(tensor_.shape()));
  }
  for (double v : tensor_.data()) {
    if (!std::isfinite(v)) throw NumericError("prototypes contain non-finite values");
    if (enforce_relu && v < 0.0) {
      throw InputError("prototypes contain negative values under the ReLU contract");
    }
  }
}

CoefficientMatrix::CoefficientMatrix(Tensor tensor) : tensor_(std::move(tensor)) {
  if (tensor_.rank() != 2) {
    throw DimensionError("coefficients must be n x k, got " +
                         shape_to_string(tensor_.shape()));
  }
  for (double v : tensor_.data()) {
    if (!(std::abs(v) <= 1.0)) {
      throw InputError("coefficients must lie in [-1, 1] after tanh");
    }
  }
}

CoefficientMatrix CoefficientMatrix::from_raw(const Tensor& raw) {
  return CoefficientMatrix(activate(raw, Activation::kTanh));
}

std::size_t BinaryMask::area() const {
  std::size_t n = 0;
  for (auto v : data) n += v != 0;
  return n;
}

Box BinaryMask::bounding_box() const {
  std::size_t x0 = width, y0 = height, x1 = 0, y1 = 0;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      if (!at(y, x)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x + 1);
      y1 = std::max(y1, y + 1);
    }
  }
  if (x1 == 0) return {};
  return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1),
          static_cast<double>(y1)};
}

void RleMask::validate() const {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total != height * width) {
    throw FormatError("RLE counts sum to " + std::to_string(total) + ", expected " +
                      std::to_string(height * width));
  }
}

std::size_t RleMask::area() const {
  std::size_t n = 0;
  for (std::size_t i = 1; i < counts.size(); i += 2) n += counts[i];
  return n;
}

Tensor assemble_masks(const PrototypeStack& prototypes,
                      const CoefficientMatrix& coefficients) {
  if (prototypes.count() != coefficients.count()) {
    throw DimensionError("assemble_masks: " + std::to_string(prototypes.count()) +
                         " prototypes but coefficients have k = " +
                         std::to_string(coefficients.count()));
  }
  const std::size_t h = prototypes.height(), w = prototypes.width();
  const Tensor flat = prototypes.tensor().reshaped({h * w, prototypes.count()});
  // [n x k] . [hw x k]^T lands directly in n x (h*w) layout.
  Tensor logits = matmul(coefficients.tensor(), flat);
  return activate(logits, Activation::kSigmoid).reshaped({coefficients.rows(), h, w});
}

Tensor mask_plane(const Tensor& masks, std::size_t i) {
  if (masks.rank() != 3 || i >= masks.dim(0)) {
    throw DimensionError("mask_plane: index out of range for " +
                         shape_to_string(masks.shape()));
  }
  auto plane = masks.slice(i);
  return Tensor({masks.dim(1), masks.dim(2)}, std::vector<double>(plane.begin(), plane.end()));
}

PixelRegion box_region(const Box& box, double image_width, double image_height,
                       std::size_t mask_width, std::size_t mask_height, int pad_px) {
  const double sx = image_width / static_cast<double>(mask_width);
  const double sy = image_height / static_cast<double>(mask_height);
  auto edge = [](double v, std::size_t limit) {
    const double f = std::floor(v);
    if (f <= 0.0) return std::size_t{0};
    if (f >= static_cast<double>(limit)) return limit;
    return static_cast<std::size_t>(f);
  };
  const double x_lo = std::min(box.x1, box.x2), x_hi = std::max(box.x1, box.x2);
  const double y_lo = std::min(box.y1, box.y2), y_hi = std::max(box.y1, box.y2);
  PixelRegion r;
  r.x0 = edge(x_lo / sx - pad_px, mask_width);
  r.x1 = edge(x_hi / sx + pad_px, mask_width);
  r.y0 = edge(y_lo / sy - pad_px, mask_height);
  r.y1 = edge(y_hi / sy + pad_px, mask_height);
  r.x1 = std::max(r.x1, r.x0);
  r.y1 = std::max(r.y1, r.y0);
  return r;
}

Tensor crop_mask(const Tensor& mask, const Box& box, double image_width,
                 double image_height, int pad_px) {
  if (mask.rank() != 2) {
    throw DimensionError("crop_mask: expected h x w mask, got " +
                         shape_to_string(mask.shape()));
  }
  const std::size_t h = mask.dim(0), w = mask.dim(1);
  const PixelRegion r = box_region(box, image_width, image_height, w, h, pad_px);
  Tensor out = mask;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!r.contains(y, x)) out(y, x) = 0.0;
    }
  }
  return out;
}

namespace {

struct Tap {
  std::size_t lo, hi;
  double frac;
};

std::vector<Tap> half_pixel_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const double max_src = static_cast<double>(in - 1);
  for (std::size_t d = 0; d < out; ++d) {
    const double src = std::clamp((d + 0.5) * scale - 0.5, 0.0, max_src);
    const auto lo = static_cast<std::size_t>(std::floor(src));
    taps[d] = {lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
  }
  return taps;
}

}  // namespace

Tensor resize_bilinear(const Tensor& mask, std::size_t out_height, std::size_t out_width) {
  if (mask.rank() != 2) {
    throw DimensionError("resize_bilinear: expected h x w mask, got " +
                         shape_to_string(mask.shape()));
  }
  if (out_height == 0 || out_width == 0) {
    throw DimensionError("resize_bilinear: output size must be positive");
  }
  const std::size_t h = mask.dim(0), w = mask.dim(1);
  if (h == out_height && w == out_width) return mask;
  const auto rows = half_pixel_taps(h, out_height);
  const auto cols = half_pixel_taps(w, out_width);
  Tensor out({out_height, out_width});
  for (std::size_t y = 0; y < out_height; ++y) {
    const Tap& ty = rows[y];
    for (std::size_t x = 0; x < out_width; ++x) {
      const Tap& tx = cols[x];
      const double top =
          mask(ty.lo, tx.lo) + (mask(ty.lo, tx.hi) - mask(ty.lo, tx.lo)) * tx.frac;
      const double bottom =
          mask(ty.hi, tx.lo) + (mask(ty.hi, tx.hi) - mask(ty.hi, tx.lo)) * tx.frac;
      out(y, x) = top + (bottom - top) * ty.frac;
    }
  }
  return out;
}

BinaryMask binarize(const Tensor& mask, double threshold) {
  if (mask.rank() != 2) {
    throw DimensionError("binarize: expected h x w mask, got " +
                         shape_to_string(mask.shape()));
  }
  BinaryMask out(mask.dim(0), mask.dim(1));
  for (std::size_t i = 0; i < mask.size(); ++i) out.data[i] = mask[i] > threshold;
  return out;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.height != b.height || a.width != b.width) {
    throw DimensionError("mask_iou: " + std::to_string(a.height) + "x" +
                         std::to_string(a.width) + " vs " + std::to_string(b.height) +
                         "x" + std::to_string(b.width));
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool pa = a.data[i] != 0, pb = b.data[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

RleMask rle_encode(const BinaryMask& mask) {
  RleMask rle{mask.height, mask.width, {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::size_t x = 0; x < mask.width; ++x) {
    for (std::size_t y = 0; y < mask.height; ++y) {
      const std::uint8_t v = mask.at(y, x);
      if (v > 1) throw FormatError("rle_encode: mask values must be 0 or 1");
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BinaryMask rle_decode(const RleMask& rle) {
  rle.validate();
  BinaryMask mask(rle.height, rle.width);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (auto run : rle.counts) {
    for (std::uint32_t r = 0; r < run; ++r, ++pos) {
      mask.at(pos % rle.height, pos / rle.height) = value;
    }
    value ^= 1;
  }
  return mask;
}

BinaryMask downsample_max(const BinaryMask& mask, std::size_t out_height,
                          std::size_t out_width) {
  if (out_height == 0 || out_width == 0) {
    throw DimensionError("downsample_max: output size must be positive");
  }
  BinaryMask out(out_height, out_width);
  for (std::size_t y = 0; y < out_height; ++y) {
    const std::size_t y0 = y * mask.height / out_height;
    const std::size_t y1 =
        std::max(y0 + 1, ((y + 1) * mask.height + out_height - 1) / out_height);
    for (std::size_t x = 0; x < out_width; ++x) {
      const std::size_t x0 = x * mask.width / out_width;
      const std::size_t x1 =
          std::max(x0 + 1, ((x + 1) * mask.width + out_width - 1) / out_width);
      std::uint8_t hit = 0;
      for (std::size_t sy = y0; sy < y1 && sy < mask.height && !hit; ++sy) {
        for (std::size_t sx = x0; sx < x1 && sx < mask.width; ++sx) {
          if (mask.at(sy, sx)) {
            hit = 1;
            break;
          }
        }
      }
      out.at(y, x) = hit;
    }
  }
  return out;
}

}  // namespace protoseg
