// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace cornerbox::cli {

/// Runs the `cornerbox` command line. `args` excludes the program name.
/// Returns the process exit code: 0 on success, 1 for input or runtime
/// failures, 2 for usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "A:B:STEP" -> {A, B, STEP}. Throws InvalidArgument.
std::array<double, 3> parse_range(const std::string& text);

}  // namespace cornerbox::cli
