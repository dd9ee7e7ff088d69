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
#ifndef PROTOSEG_ERRORS_HPP_
#define PROTOSEG_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace protoseg {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes or mask dimensions that do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf inputs or overflow in a numeric kernel.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized data: tensor files, RLE counts, JSON documents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values or inconsistent inputs on load.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace protoseg

#endif  // PROTOSEG_ERRORS_HPP_
