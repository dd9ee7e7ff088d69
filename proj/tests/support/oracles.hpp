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
// Independent reference implementations used only by tests. Nothing here
// calls into the library code paths it is used to check.

#ifndef PROTOSEG_TESTS_ORACLES_HPP_
#define PROTOSEG_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <list>
#include <random>
#include <vector>

#include "protoseg/geometry.hpp"
#include "protoseg/maskops.hpp"
#include "protoseg/tensor.hpp"

namespace protoseg::testing {

inline double oracle_iou(const Box& a, const Box& b) {
  const double left = a.x1 > b.x1 ? a.x1 : b.x1;
  const double right = a.x2 < b.x2 ? a.x2 : b.x2;
  const double top = a.y1 > b.y1 ? a.y1 : b.y1;
  const double bottom = a.y2 < b.y2 ? a.y2 : b.y2;
  double inter = 0.0;
  if (right > left && bottom > top) inter = (right - left) * (bottom - top);
  const double uni = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

// Greedy NMS over boxes already sorted by descending score, written as a
// shrinking work list. Returns kept positions.
inline std::vector<std::size_t> greedy_nms_oracle(const std::vector<Box>& boxes,
                                                  double threshold) {
  std::list<std::size_t> remaining;
  for (std::size_t i = 0; i < boxes.size(); ++i) remaining.push_back(i);
  std::vector<std::size_t> kept;
  while (!remaining.empty()) {
    const std::size_t best = remaining.front();
    remaining.pop_front();
    kept.push_back(best);
    remaining.remove_if(
        [&](std::size_t j) { return oracle_iou(boxes[best], boxes[j]) > threshold; });
  }
  return kept;
}

// A detection is dropped iff any higher-ranked detection, kept or not,
// overlaps it with IoU > threshold.
inline std::vector<std::size_t> any_suppressor_oracle(const std::vector<Box>& boxes,
                                                      double threshold) {
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < boxes.size(); ++j) {
    bool suppressed = false;
    for (std::size_t i = 0; i < j; ++i) {
      if (oracle_iou(boxes[i], boxes[j]) > threshold) suppressed = true;
    }
    if (!suppressed) kept.push_back(j);
  }
  return kept;
}

// Explicit n x n IoU matrix, triangle zeroed for i >= j, then column max.
inline std::vector<double> triu_column_max_oracle(const std::vector<Box>& boxes) {
  const std::size_t n = boxes.size();
  std::vector<std::vector<double>> x(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) x[i][j] = oracle_iou(boxes[i], boxes[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) x[i][j] = 0.0;
  }
  std::vector<double> k(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) k[j] = std::max(k[j], x[i][j]);
  }
  return k;
}

// M[i][y][x] = 1 / (1 + exp(-sum_t P[y][x][t] C[i][t])) pixel by pixel.
inline std::vector<double> assembly_oracle(const Tensor& p, const Tensor& c) {
  const std::size_t h = p.dim(0), w = p.dim(1), k = p.dim(2), n = c.dim(0);
  std::vector<double> out(n * h * w);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        double z = 0.0;
        for (std::size_t t = 0; t < k; ++t) z += p(y, x, t) * c(i, t);
        out[(i * h + y) * w + x] = 1.0 / (1.0 + std::exp(-z));
      }
    }
  }
  return out;
}

// Samples a 2-D grid at half-pixel centres with edge clamping.
inline double bilinear_sample_oracle(const Tensor& src, double sy, double sx) {
  const double h = static_cast<double>(src.dim(0)), w = static_cast<double>(src.dim(1));
  sy = std::min(std::max(sy, 0.0), h - 1.0);
  sx = std::min(std::max(sx, 0.0), w - 1.0);
  const auto y0 = static_cast<std::size_t>(sy), x0 = static_cast<std::size_t>(sx);
  const std::size_t y1 = std::min<std::size_t>(y0 + 1, src.dim(0) - 1);
  const std::size_t x1 = std::min<std::size_t>(x0 + 1, src.dim(1) - 1);
  const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
  return (1 - fy) * ((1 - fx) * src(y0, x0) + fx * src(y0, x1)) +
         fy * ((1 - fx) * src(y1, x0) + fx * src(y1, x1));
}

// AP from a ranked list of true/false positive flags: precision and recall
// per rank, then for each of 101 recall levels the best precision at any
// rank whose recall reaches it.
inline double manual_pr_ap(const std::vector<bool>& ranked_tp, std::size_t num_gt) {
  std::vector<double> precision, recall;
  double tp = 0, fp = 0;
  for (bool hit : ranked_tp) {
    (hit ? tp : fp) += 1;
    precision.push_back(tp / (tp + fp));
    recall.push_back(tp / static_cast<double>(num_gt));
  }
  double sum = 0;
  for (int level = 0; level <= 100; ++level) {
    const double r = level / 100.0;
    double best = 0;
    for (std::size_t i = 0; i < precision.size(); ++i) {
      if (recall[i] >= r) best = std::max(best, precision[i]);
    }
    sum += best;
  }
  return sum / 101.0;
}

inline Box random_box(std::mt19937_64& rng, double extent, double min_side = 1.0,
                      double max_side = 120.0) {
  std::uniform_real_distribution<double> pos(0.0, extent), side(min_side, max_side);
  const double x = pos(rng), y = pos(rng);
  return {x, y, x + side(rng), y + side(rng)};
}

inline Tensor random_tensor(std::mt19937_64& rng, Shape shape, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = dist(rng);
  return t;
}

inline BinaryMask random_mask(std::mt19937_64& rng, std::size_t h, std::size_t w,
                              double density = 0.5) {
  std::bernoulli_distribution bit(density);
  BinaryMask m(h, w);
  for (auto& v : m.data) v = bit(rng);
  return m;
}

}  // namespace protoseg::testing

#endif  // PROTOSEG_TESTS_ORACLES_HPP_
