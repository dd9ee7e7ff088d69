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
#ifndef PROTOSEG_MASKOPS_HPP_
#define PROTOSEG_MASKOPS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "protoseg/geometry.hpp"
#include "protoseg/tensor.hpp"

namespace protoseg {

// h x w x k prototype maps. With enforce_relu the constructor rejects
// negative values, matching a ReLU-terminated protonet.
class PrototypeStack {
 public:
  explicit PrototypeStack(Tensor tensor, bool enforce_relu = false);

  const Tensor& tensor() const { return tensor_; }
  std::size_t height() const { return tensor_.dim(0); }
  std::size_t width() const { return tensor_.dim(1); }
  std::size_t count() const { return tensor_.dim(2); }

 private:
  Tensor tensor_;
};

// n x k mask coefficients after tanh, so every entry lies in [-1, 1].
class CoefficientMatrix {
 public:
  explicit CoefficientMatrix(Tensor tensor);
  // Applies tanh to raw head outputs.
  static CoefficientMatrix from_raw(const Tensor& raw);

  const Tensor& tensor() const { return tensor_; }
  std::size_t rows() const { return tensor_.dim(0); }
  std::size_t count() const { return tensor_.dim(1); }

 private:
  Tensor tensor_;
};

// Row-major 0/1 mask.
struct BinaryMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(std::size_t h, std::size_t w, std::uint8_t fill = 0)
      : height(h), width(w), data(h * w, fill) {}

  std::uint8_t& at(std::size_t y, std::size_t x) { return data[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return data[y * width + x]; }
  std::size_t area() const;
  // Tight bounds of the set pixels; an all-zero box for an empty mask.
  Box bounding_box() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// Uncompressed COCO run-length encoding: column-major scan, runs alternate
// starting with a (possibly empty) run of zeros.
struct RleMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint32_t> counts;

  // Throws FormatError if the runs do not cover exactly height * width pixels.
  void validate() const;
  std::size_t area() const;

  friend bool operator==(const RleMask&, const RleMask&) = default;
};

// M = sigmoid(P C^T) as an n x h x w tensor, computed with one matmul of the
// flattened [hw x k] prototypes against the [n x k] coefficients.
Tensor assemble_masks(const PrototypeStack& prototypes,
                      const CoefficientMatrix& coefficients);

// Plane i of an n x h x w tensor as an h x w tensor.
Tensor mask_plane(const Tensor& masks, std::size_t i);

// Half-open pixel range [x0, x1) x [y0, y1) of a mask.
struct PixelRegion {
  std::size_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(std::size_t y, std::size_t x) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  std::size_t area() const { return (x1 - x0) * (y1 - y0); }
};

// Maps a box given in image coordinates onto a mask_w x mask_h grid covering
// the whole image, widened by pad_px grid pixels on each side and clamped.
// Edges are truncated: [floor(x1 / sx - pad), floor(x2 / sx + pad)).
PixelRegion box_region(const Box& box, double image_width, double image_height,
                       std::size_t mask_width, std::size_t mask_height, int pad_px);

// Zeroes every value of an h x w mask outside box_region(); inside is untouched.
Tensor crop_mask(const Tensor& mask, const Box& box, double image_width,
                 double image_height, int pad_px = 1);

// Bilinear resize with half-pixel centers: source coordinate
// (dst + 0.5) * in / out - 0.5, clamped to the valid range.
Tensor resize_bilinear(const Tensor& mask, std::size_t out_height, std::size_t out_width);

// 1 where value > threshold (strict).
BinaryMask binarize(const Tensor& mask, double threshold = 0.5);

// |a & b| / |a | b|, 0 when both are empty. Throws DimensionError on size mismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

RleMask rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const RleMask& rle);

// Downsamples by max-pooling each output cell over the source pixels it
// covers, so thin or small objects survive.
BinaryMask downsample_max(const BinaryMask& mask, std::size_t out_height,
                          std::size_t out_width);

}  // namespace protoseg

#endif  // PROTOSEG_MASKOPS_HPP_
