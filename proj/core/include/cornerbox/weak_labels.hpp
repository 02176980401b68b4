// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// Weak corner annotations: deriving them from full labels, turning them into
// partial box targets, and defining foreground/erased points for training.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cornerbox/geometry.hpp"
#include "cornerbox/recovery.hpp"

namespace cornerbox {

struct ImageBox {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;

  bool valid() const { return u_min < u_max && v_min < v_max; }
  friend bool operator==(const ImageBox&, const ImageBox&) = default;
};

struct AnnotatedCorner {
  int index = 0;
  double x = 0.0;
  double y = 0.0;
  double z_g = 0.0;

  friend bool operator==(const AnnotatedCorner&, const AnnotatedCorner&) = default;
};

/// Clicked BEV corners of one object, optionally with its image box.
struct WeakAnnotation {
  std::string frame;
  int object = 0;
  std::vector<AnnotatedCorner> corners;  // 0..4 entries, distinct indices
  std::optional<ImageBox> image_box;

  friend bool operator==(const WeakAnnotation&, const WeakAnnotation&) = default;
};

/// Throws InvalidAnnotation with a field-level reason. Empty corner lists
/// are allowed (fully occluded objects carry weight 0).
void validate(const WeakAnnotation& ann);

enum class TargetCase { kSide, kFrontRear, kDiagonal, kThreePlus };

std::string_view to_string(TargetCase c);

/// Box parameters recoverable from an annotation.
///   Side       two corners on a long edge: l, theta
///   FrontRear  two corners on a short edge: w, theta
///   Diagonal   two opposite corners plus a supplied size: l, w, theta
///   ThreePlus  three or four corners: l, w, theta
struct WeakToFullTarget {
  TargetCase kind = TargetCase::kSide;
  std::vector<AnnotatedCorner> corners;  // sorted by index
  std::optional<double> l;
  std::optional<double> w;
  double theta = 0.0;
  std::optional<BoxBEV> bev;  // set when l, w, and theta are all known
};

/// Throws LocalizeOnly for a single corner, Underdetermined for a diagonal
/// pair without a complete size prior, NoCorners for an empty annotation.
WeakToFullTarget weak_to_full(const WeakAnnotation& ann, const SizePrior& diagonal_size = {});

/// Corners of `box` flagged visible when at least one cloud point lies
/// within `radius` of them in the BEV plane.
CornerSet visibility_filter(const BoxBEV& box, const PointCloud& cloud, double radius = 0.3);

enum class PointLabel : unsigned char { kBackground, kForeground, kErased };

struct MaskedPoints {
  std::vector<PointLabel> labels;  // one per cloud point

  std::size_t count(PointLabel label) const;
};

/// Foreground = within `radius` (BEV) of any annotated corner.
MaskedPoints foreground_mask(const std::vector<WeakAnnotation>& anns, const PointCloud& cloud,
                             double radius = 0.7);

enum class ErasureShape { kCenterBox, kCornerBlocks };

struct ErasureStrategy {
  ErasureShape shape = ErasureShape::kCornerBlocks;
  double fraction = 0.5;
};

/// Sub-rectangles of `box` whose points are erased under `strategy`.
std::vector<BoxBEV> erased_regions(const BoxBEV& box, const ErasureStrategy& strategy);

/// In-box points outside the erased regions are Foreground, in-box points
/// inside them Erased, everything else Background.
MaskedPoints erasure_mask(const BoxBEV& box, const PointCloud& cloud,
                          const ErasureStrategy& strategy);

/// Loss weight M/m for an object with m of M corners annotated; 0 for m = 0.
double annotation_weight(int annotated, int total = 4);

/// Converts full labels to weak annotations: corners of each box, visibility
/// filtered against `cloud`, with z_g at the box bottom. `image_boxes`, when
/// non-empty, must align with `labels` by position.
std::vector<WeakAnnotation> labels_to_weak(const std::string& frame,
                                           const std::vector<Box3D>& labels,
                                           const PointCloud& cloud,
                                           const std::vector<std::optional<ImageBox>>& image_boxes = {},
                                           double visibility_radius = 0.3);

}  // namespace cornerbox
