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
#include "protoseg/tensor_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "protoseg/errors.hpp"

namespace protoseg {
namespace {

constexpr std::uint8_t kMagic[4] = {0x59, 0x54, 0x4E, 0x53};

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
  }
}

template <typename U>
U get_le(const std::uint8_t* p) {
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) value |= static_cast<U>(p[b]) << (8 * b);
  return value;
}

DType parse_dtype(std::uint8_t raw) {
  switch (raw) {
    case 1:
      return DType::kFloat32;
    case 2:
      return DType::kFloat64;
    case 3:
      return DType::kUInt8;
    default:
      throw FormatError("tensor file: unknown dtype " + std::to_string(raw));
  }
}

}  // namespace

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kFloat32:
      return 4;
    case DType::kFloat64:
      return 8;
    case DType::kUInt8:
      return 1;
  }
  throw FormatError("tensor file: unknown dtype");
}

std::vector<std::uint8_t> encode_tensor_file(const Tensor& tensor, DType dtype) {
  if (tensor.rank() == 0 || tensor.rank() > 255) {
    throw InputError("tensor file: rank must be in [1, 255]");
  }
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kTensorFileVersion);
  out.push_back(static_cast<std::uint8_t>(dtype));
  out.push_back(static_cast<std::uint8_t>(tensor.rank()));
  for (std::size_t d : tensor.shape()) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw InputError("tensor file: dimension exceeds 32 bits");
    }
    put_le(out, static_cast<std::uint32_t>(d));
  }
  out.reserve(out.size() + tensor.size() * dtype_size(dtype));
  for (double v : tensor.data()) {
    switch (dtype) {
      case DType::kFloat32:
        put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        break;
      case DType::kFloat64:
        put_le(out, std::bit_cast<std::uint64_t>(v));
        break;
      case DType::kUInt8:
        if (!(v >= 0.0 && v <= 255.0) || std::floor(v) != v) {
          throw InputError("tensor file: value not representable as u8");
        }
        out.push_back(static_cast<std::uint8_t>(v));
        break;
    }
  }
  return out;
}

TensorFile decode_tensor_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 7 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("tensor file: bad magic");
  }
  if (bytes[4] != kTensorFileVersion) {
    throw FormatError("tensor file: unsupported version " + std::to_string(bytes[4]));
  }
  TensorFile file;
  file.dtype = parse_dtype(bytes[5]);
  const std::size_t ndim = bytes[6];
  if (ndim == 0) throw FormatError("tensor file: ndim must be >= 1");
  std::size_t pos = 7;
  if (bytes.size() < pos + 4 * ndim) throw FormatError("tensor file: truncated header");
  Shape shape;
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i, pos += 4) {
    const auto d = get_le<std::uint32_t>(bytes.data() + pos);
    if (d == 0) throw FormatError("tensor file: zero-sized dimension");
    shape.push_back(d);
    count *= d;
  }
  const std::size_t width = dtype_size(file.dtype);
  if (bytes.size() - pos != count * width) {
    throw FormatError("tensor file: payload is " + std::to_string(bytes.size() - pos) +
                      " bytes, expected " + std::to_string(count * width));
  }
  std::vector<double> data(count);
  const std::uint8_t* p = bytes.data() + pos;
  for (std::size_t i = 0; i < count; ++i, p += width) {
    switch (file.dtype) {
      case DType::kFloat32:
        data[i] = std::bit_cast<float>(get_le<std::uint32_t>(p));
        break;
      case DType::kFloat64:
        data[i] = std::bit_cast<double>(get_le<std::uint64_t>(p));
        break;
      case DType::kUInt8:
        data[i] = *p;
        break;
    }
  }
  file.tensor = Tensor(std::move(shape), std::move(data));
  return file;
}

void write_tensor_file(const std::filesystem::path& path, const Tensor& tensor, DType dtype) {
  const auto bytes = encode_tensor_file(tensor, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

TensorFile read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor_file(bytes);
}

}  // namespace protoseg
