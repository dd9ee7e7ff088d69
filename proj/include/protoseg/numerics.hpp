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
#ifndef PROTOSEG_NUMERICS_HPP_
#define PROTOSEG_NUMERICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "protoseg/tensor.hpp"

namespace protoseg {

enum class Activation { kSigmoid, kTanh, kRelu, kSoftmaxLastDim };

// out[i][j] = sum_t a[i][t] * b_transposed[j][t], summed left to right over t.
// Takes the second operand already transposed so both operands are walked
// along contiguous rows.
Tensor matmul(const Tensor& a, const Tensor& b_transposed);

// Elementwise activation, or softmax over each slice of the last dimension.
// Throws NumericError on non-finite input.
Tensor activate(const Tensor& x, Activation kind);

double sigmoid(double x);

// Stable descending order; equal scores keep ascending original index.
// Throws NumericError on NaN.
std::vector<std::size_t> argsort_desc(std::span<const double> scores);

}  // namespace protoseg

#endif  // PROTOSEG_NUMERICS_HPP_
