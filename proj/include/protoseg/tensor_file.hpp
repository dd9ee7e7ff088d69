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
#ifndef PROTOSEG_TENSOR_FILE_HPP_
#define PROTOSEG_TENSOR_FILE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "protoseg/tensor.hpp"

namespace protoseg {

// Binary tensor container (.ytns):
//   "YTNS" | version u8 = 1 | dtype u8 | ndim u8 | ndim x u32 LE dims |
//   row-major little-endian payload.
enum class DType : std::uint8_t { kFloat32 = 1, kFloat64 = 2, kUInt8 = 3 };

inline constexpr std::uint8_t kTensorFileVersion = 1;

std::size_t dtype_size(DType dtype);

struct TensorFile {
  DType dtype = DType::kFloat64;
  Tensor tensor;
};

// Throws InputError when a value cannot be stored exactly in dtype
// (non-integers or out-of-range values for kUInt8, non-finite never rejected).
std::vector<std::uint8_t> encode_tensor_file(const Tensor& tensor, DType dtype);
// Throws FormatError on bad magic, unknown version or dtype, or length mismatch.
TensorFile decode_tensor_file(std::span<const std::uint8_t> bytes);

void write_tensor_file(const std::filesystem::path& path, const Tensor& tensor, DType dtype);
TensorFile read_tensor_file(const std::filesystem::path& path);

}  // namespace protoseg

#endif  // PROTOSEG_TENSOR_FILE_HPP_
