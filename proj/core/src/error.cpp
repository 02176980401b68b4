// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/error.hpp"

namespace cornerbox {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotARectangle: return "NotARectangle";
    case ErrorCode::kInvalidCornerIndex: return "InvalidCornerIndex";
    case ErrorCode::kInfeasibleGeometry: return "InfeasibleGeometry";
    case ErrorCode::kUnsupportedScheme: return "UnsupportedScheme";
    case ErrorCode::kUnknownParameter: return "UnknownParameter";
    case ErrorCode::kLocalizeOnly: return "LocalizeOnly";
    case ErrorCode::kUnderdetermined: return "Underdetermined";
    case ErrorCode::kDegenerate: return "Degenerate";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kNoSolution: return "NoSolution";
    case ErrorCode::kNonPositiveHeight: return "NonPositiveHeight";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kMissingComponent: return "MissingComponent";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kInvalidAnnotation: return "InvalidAnnotation";
    case ErrorCode::kMissingImageBox: return "MissingImageBox";
    case ErrorCode::kNoCorners: return "NoCorners";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code) {}

}  // namespace cornerbox
