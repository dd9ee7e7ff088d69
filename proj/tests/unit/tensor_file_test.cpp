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

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "protoseg/errors.hpp"

namespace protoseg {
namespace {

using Bytes = std::vector<std::uint8_t>;

bool bit_equal(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

TEST(TensorFileTest, HandWrittenFloat64Layout) {
  const Bytes expected{'Y', 'T', 'N', 'S', 1, 2, 1, 2, 0, 0, 0,
                       0, 0, 0, 0, 0, 0, 0xF0, 0x3F,  // 1.0
                       0, 0, 0, 0, 0, 0, 0, 0xC0};    // -2.0
  const Tensor t({2}, {1.0, -2.0});
  EXPECT_EQ(encode_tensor_file(t, DType::kFloat64), expected);
  const TensorFile back = decode_tensor_file(expected);
  EXPECT_EQ(back.dtype, DType::kFloat64);
  EXPECT_EQ(back.tensor, t);
}

TEST(TensorFileTest, HandWrittenFloat32AndUInt8Layouts) {
  const Bytes f32{'Y', 'T', 'N', 'S', 1, 1, 2, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0x3F};
  EXPECT_EQ(encode_tensor_file(Tensor({1, 1}, {0.5}), DType::kFloat32), f32);
  const Bytes u8{'Y', 'T', 'N', 'S', 1, 3, 1, 3, 0, 0, 0, 0, 7, 255};
  EXPECT_EQ(encode_tensor_file(Tensor({3}, {0, 7, 255}), DType::kUInt8), u8);
  EXPECT_EQ(decode_tensor_file(u8).tensor, Tensor({3}, {0, 7, 255}));
}

TEST(TensorFileTest, BitExactRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> dim(1, 9), rank(1, 4);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int trial = 0; trial < 300; ++trial) {
    Shape shape(rank(rng));
    for (auto& d : shape) d = dim(rng);
    Tensor t(shape);
    // Arbitrary bit patterns, including NaN payloads and subnormals.
    for (double& v : t.data()) v = std::bit_cast<double>(bits(rng));
    ASSERT_TRUE(bit_equal(decode_tensor_file(encode_tensor_file(t, DType::kFloat64)).tensor, t));

    Tensor f(shape);
    for (double& v : f.data()) v = std::bit_cast<float>(static_cast<std::uint32_t>(bits(rng)));
    ASSERT_TRUE(bit_equal(decode_tensor_file(encode_tensor_file(f, DType::kFloat32)).tensor, f));

    Tensor u(shape);
    for (double& v : u.data()) v = static_cast<double>(bits(rng) % 256);
    ASSERT_EQ(decode_tensor_file(encode_tensor_file(u, DType::kUInt8)).tensor, u);
  }
}

TEST(TensorFileTest, FileRoundTrip) {
  const auto path = std::filesystem::path(::testing::TempDir()) / "tensor_file_test.ytns";
  std::mt19937_64 rng(2);
  const Tensor t = testing::random_tensor(rng, {4, 5, 6}, -1e3, 1e3);
  write_tensor_file(path, t, DType::kFloat64);
  const TensorFile back = read_tensor_file(path);
  EXPECT_TRUE(bit_equal(back.tensor, t));
  std::filesystem::remove(path);
  EXPECT_THROW(read_tensor_file(path), InputError);
}

TEST(TensorFileTest, MalformedInputsRejected) {
  const Bytes good = encode_tensor_file(Tensor({2, 2}, 1.0), DType::kFloat32);
  Bytes b = good;
  b[0] = 'X';
  EXPECT_THROW(decode_tensor_file(b), FormatError);
  b = good;
  b[4] = 2;
  EXPECT_THROW(decode_tensor_file(b), FormatError);
  b = good;
  b[5] = 9;
  EXPECT_THROW(decode_tensor_file(b), FormatError);
  b = good;
  b.pop_back();
  EXPECT_THROW(decode_tensor_file(b), FormatError);
  b = good;
  b.push_back(0);
  EXPECT_THROW(decode_tensor_file(b), FormatError);
  b = good;
  b[6] = 0;  // rank 0
  EXPECT_THROW(decode_tensor_file(b), FormatError);
  EXPECT_THROW(decode_tensor_file(Bytes{'Y', 'T'}), FormatError);
}

TEST(TensorFileTest, UnrepresentableBytesRejected) {
  EXPECT_THROW(encode_tensor_file(Tensor({1}, {0.5}), DType::kUInt8), InputError);
  EXPECT_THROW(encode_tensor_file(Tensor({1}, {256}), DType::kUInt8), InputError);
  EXPECT_THROW(encode_tensor_file(Tensor({1}, {-1}), DType::kUInt8), InputError);
}

}  // namespace
}  // namespace protoseg
