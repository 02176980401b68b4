// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cornerbox {

/// Failure categories surfaced by the library. The names double as the
/// reason codes written into recovery reports and service responses.
enum class ErrorCode {
  kNonFinite,
  kInvalidArgument,
  kNotARectangle,
  kInvalidCornerIndex,
  kInfeasibleGeometry,
  kUnsupportedScheme,
  kUnknownParameter,
  kLocalizeOnly,
  kUnderdetermined,
  kDegenerate,
  kInsufficientPoints,
  kDegenerateGeometry,
  kBehindCamera,
  kNoSolution,
  kNonPositiveHeight,
  kMalformedRecord,
  kMissingComponent,
  kTruncatedFile,
  kInvalidAnnotation,
  kMissingImageBox,
  kNoCorners,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cornerbox
