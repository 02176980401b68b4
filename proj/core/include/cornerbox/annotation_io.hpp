// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// Corner-annotation interchange: one JSON object per line,
//
//   {"frame":"000123","object":0,
//    "corners":[{"n":0,"x":12.0,"y":6.0,"zg":-1.7}],
//    "image_box":[umin,vmin,umax,vmax]}
//
// image_box is null when the object has no image box. Doubles are written
// in shortest round-trip form, so every value survives parse/serialize
// unchanged.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cornerbox/weak_labels.hpp"

namespace cornerbox {

std::string to_json_line(const WeakAnnotation& ann);

/// Parses one record. With `require_ids` false, "frame" and "object" may be
/// omitted (partial records posted by the annotator). Throws
/// InvalidAnnotation with the offending field in the message.
WeakAnnotation parse_annotation(std::string_view json, bool require_ids = true);

/// Parses every non-blank line; the error message carries the line number.
std::vector<WeakAnnotation> parse_annotation_lines(std::string_view text);
std::string serialize_annotation_lines(const std::vector<WeakAnnotation>& anns);

}  // namespace cornerbox
