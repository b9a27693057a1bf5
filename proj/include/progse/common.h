// Copyright 2026 The Progse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROGSE_COMMON_H_
#define PROGSE_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace progse {

inline constexpr const char* kVersion = "0.1.0";

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kSampleRateMismatch,
  kInvalidGeometry,
  kInfeasibleRoom,
  kInsufficientDecay,
  kZeroPower,
  kConfig,
  kFormat,
  kUnsupportedVersion,
  kTruncated,
  kChecksumMismatch,
  kIo,
  kMissingReference,
  kOutOfRange,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Dense row-major matrix. Used for feature matrices, magnitudes and weights.
template <typename T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, T fill = T{})
      : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<T> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const T> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
  bool operator==(const Matrix&) const = default;
};

using RealMatrix = Matrix<double>;

inline void RequireSameShape(std::size_t rows_a, std::size_t cols_a,
                             std::size_t rows_b, std::size_t cols_b,
                             const char* what) {
  if (rows_a != rows_b || cols_a != cols_b) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + ": shape mismatch (" +
                    std::to_string(rows_a) + "x" + std::to_string(cols_a) +
                    " vs " + std::to_string(rows_b) + "x" +
                    std::to_string(cols_b) + ")");
  }
}

// Derives an independent 64-bit seed from a parent seed and a stream index
// (splitmix64 finalizer).
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace progse

#endif  // PROGSE_COMMON_H_
