// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// Turning corner evidence into boxes: corner clustering into proposals,
// least-squares rectangle fitting, ground-plane estimation, and top-height
// recovery from an image box through the camera projection.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "cornerbox/geometry.hpp"

namespace cornerbox {

/// Composed 3x4 projection from sensor-frame points to pixels.
using ProjectionMatrix = Eigen::Matrix<double, 3, 4>;

struct IndexedCorner {
  double x = 0.0;
  double y = 0.0;
  int index = 0;

  Vec2 xy() const { return {x, y}; }
};

/// Known extents used when the corner configuration cannot determine them.
struct SizePrior {
  std::optional<double> length;
  std::optional<double> width;
};

inline constexpr double kDefaultExtent = 6.0;

struct RectangleFit {
  BoxBEV box;
  bool length_determined = true;  // false: box.l came from a prior/default
  bool width_determined = true;
  double objective = 0.0;  // sum of squared corner residuals
  int iterations = 0;
};

/// Sum of squared distances between `corners` and the same-index corners
/// of `box`.
double rectangle_objective(const BoxBEV& box,
                           const std::vector<IndexedCorner>& corners);

/// Least-squares rectangle through corners with known indices.
///
/// Any three corners (or all four) determine the box. Two adjacent corners
/// leave the dimension across that edge free: it is taken from `prior`, or
/// `kDefaultExtent` when the prior is empty, and flagged as undetermined.
/// A diagonal pair needs both dimensions in `prior`.
///
/// Throws Degenerate when the corners span less than 1e-6 m,
/// InvalidCornerIndex on repeated or out-of-range indices, Underdetermined
/// for a single corner or a bare diagonal pair, and InfeasibleGeometry when
/// the optimum has a non-positive side.
RectangleFit fit_rectangle(const std::vector<IndexedCorner>& corners,
                           const SizePrior& prior = {});

struct CornerObservation {
  double x = 0.0;
  double y = 0.0;
  int index = 0;
  double score = 1.0;
};

enum class ProposalSource { kFitted, kFallbackRegion };

struct Proposal {
  BoxBEV bev;
  ProposalSource source = ProposalSource::kFitted;
  std::vector<std::size_t> member_corner_ids;  // positions in the input list
};

struct ClusterOptions {
  double cluster_radius = 0.5;
  double match_radius = 6.0;
  int nearest_candidates = 3;
  double fallback_extent = kDefaultExtent;
};

/// Groups corner observations into box proposals.
///
/// Observations are first agglomerated per corner index (single linkage at
/// `cluster_radius`, score-weighted centroids). Each cluster then proposes
/// its nearest clusters of other indices within `match_radius` as partners;
/// partners are merged greedily by centroid distance while the merged set
/// keeps distinct indices and remains rectangle-consistent. Groups of two
/// or more are fitted; everything else becomes a fallback square region.
/// The output is sorted by centre and does not depend on input order.
std::vector<Proposal> cluster_corners(const std::vector<CornerObservation>& obs,
                                      const ClusterOptions& options = {});

/// Plane a*x + b*y + c*z + d = 0 with unit normal and c >= 0.
struct GroundPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double d = 0.0;

  /// Ground elevation below (x, y).
  double height_at(double x, double y) const;
  double distance(double x, double y, double z) const;
};

struct PlaneFitOptions {
  int iterations = 200;
  double inlier_tolerance = 0.15;
  std::uint64_t seed = 42;
};

/// Random-sample consensus plane fit refined by least squares over the
/// winning inlier set. Deterministic for a given seed.
GroundPlane fit_ground_plane(const PointCloud& cloud,
                             const PlaneFitOptions& options = {});

/// Least-squares plane through the given points (no outlier rejection).
GroundPlane fit_plane_least_squares(const std::vector<Eigen::Vector3d>& points);

struct CornerHeights {
  std::array<double, 4> candidates{};
  double top = 0.0;  // minimum candidate
};

/// Solves, per BEV corner, the height z at which the corner projects onto
/// image row `v_top` (the top edge of the object's image box), then takes
/// the minimum as the box top. Throws NoSolution when the vertical line
/// through a corner projects to a single image row, and BehindCamera when
/// the solved point has non-positive depth.
CornerHeights solve_corner_heights(const std::array<Vec2, 4>& bev_corners,
                                   const ProjectionMatrix& projection,
                                   double v_top);

/// Box with bottom at `ground_z` and top at `top_z`. Throws
/// NonPositiveHeight if top_z <= ground_z.
Box3D assemble_box3d(const BoxBEV& bev, double top_z, double ground_z);
Box3D assemble_box3d(const BoxBEV& bev, double top_z, const GroundPlane& ground);

}  // namespace cornerbox
