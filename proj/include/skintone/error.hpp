/*
 * Copyright 2026 The Skintone Audit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SKINTONE_ERROR_HPP_
#define SKINTONE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace skintone {

// Failure categories. Each maps onto one CLI exit code (see exit_code()).
enum class ErrorCode {
  kUsage,                // bad flag, bad config key or value
  kIo,                   // file cannot be opened or written
  kParse,                // malformed CSV / config / spec content
  kDecode,               // image could not be decoded
  kDimensionMismatch,
  kEmptyRegion,          // every pixel excluded
  kDegeneratePoint,      // ITA undefined at (L, b) = (50, 0)
  kEmptyInput,
  kUnknownLabel,
  kDuplicateRecord,
  kMissingIta,
  kInsufficientPoints,
  kDegenerateX,
  kZeroVariance,
  kLengthMismatch,
  kUnrepresentableColor,
  kNoEvaluablePairs,
  kInternal,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDecode: return "decode";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kEmptyRegion: return "empty_region";
    case ErrorCode::kDegeneratePoint: return "degenerate_point";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kUnknownLabel: return "unknown_label";
    case ErrorCode::kDuplicateRecord: return "duplicate_record";
    case ErrorCode::kMissingIta: return "missing_ita";
    case ErrorCode::kInsufficientPoints: return "insufficient_points";
    case ErrorCode::kDegenerateX: return "degenerate_x";
    case ErrorCode::kZeroVariance: return "zero_variance";
    case ErrorCode::kLengthMismatch: return "length_mismatch";
    case ErrorCode::kUnrepresentableColor: return "unrepresentable_color";
    case ErrorCode::kNoEvaluablePairs: return "no_evaluable_pairs";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// 1 usage error, 2 data error, 3 internal error.
inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return 1;
    case ErrorCode::kInternal: return 3;
    default: return 2;
  }
}

}  // namespace skintone

#endif  // SKINTONE_ERROR_HPP_
