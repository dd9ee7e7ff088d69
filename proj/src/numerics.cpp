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
#include "protoseg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "protoseg/errors.hpp"

namespace protoseg {

Tensor matmul(const Tensor& a, const Tensor& b_transposed) {
  if (a.rank() != 2 || b_transposed.rank() != 2 ||
      a.dim(1) != b_transposed.dim(1)) {
    throw DimensionError("matmul: incompatible shapes " +
                         shape_to_string(a.shape()) + " and transposed " +
                         shape_to_string(b_transposed.shape()));
  }
  const std::size_t m = a.dim(0), n = b_transposed.dim(0), k = a.dim(1);
  Tensor out({m, n});
  const double* pa = a.data().data();
  const double* pb = b_transposed.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = pa + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* col = pb + j * k;
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += row[t] * col[t];
      po[i * n + j] = acc;
    }
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor activate(const Tensor& x, Activation kind) {
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw NumericError("activate: non-finite input");
  }
  Tensor out = x;
  auto values = out.data();
  switch (kind) {
    case Activation::kSigmoid:
      for (double& v : values) v = sigmoid(v);
      break;
    case Activation::kTanh:
      for (double& v : values) v = std::tanh(v);
      break;
    case Activation::kRelu:
      for (double& v : values) v = std::max(v, 0.0);
      break;
    case Activation::kSoftmaxLastDim: {
      const std::size_t inner = x.shape().back();
      for (std::size_t start = 0; start < values.size(); start += inner) {
        auto row = values.subspan(start, inner);
        const double peak = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (double& v : row) {
          v = std::exp(v - peak);
          total += v;
        }
        for (double& v : row) v /= total;
      }
      break;
    }
  }
  return out;
}

std::vector<std::size_t> argsort_desc(std::span<const double> scores) {
  for (double s : scores) {
    if (std::isnan(s)) throw NumericError("argsort_desc: NaN score");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return scores[l] > scores[r];
  });
  return order;
}

}  // namespace protoseg
