// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// Box, corner, and point-cloud types in the sensor frame, plus exact
// rotated-rectangle IoU.
//
// Frame convention: x forward, y left, z up. Yaw is measured
// counterclockwise from +x about +z. Corner indices run clockwise seen from
// above, starting at the front-left corner:
//
//          3 (BL) ---------- 0 (FL)
//            |                 |   --> heading (+l)
//          2 (BR) ---------- 1 (FR)

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace cornerbox {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double bearing(Vec2 a) { return std::atan2(a.y, a.x); }

/// Rotates `v` counterclockwise by `theta`.
inline Vec2 rotate(Vec2 v, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Oriented rectangle in the bird's-eye-view plane.
struct BoxBEV {
  double x = 0.0;
  double y = 0.0;
  double l = 0.0;  // along heading
  double w = 0.0;
  double theta = 0.0;

  Vec2 center() const { return {x, y}; }
  double area() const { return l * w; }
  bool valid() const;
};

/// Oriented 3D box. (x, y, z) is the geometric center.
struct Box3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double l = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;

  BoxBEV bev() const { return {x, y, l, w, theta}; }
  double bottom() const { return z - h / 2.0; }
  double top() const { return z + h / 2.0; }
  double volume() const { return l * w * h; }
  bool valid() const;
};

/// Box3D from a BEV footprint and a vertical extent [bottom, bottom + h].
Box3D make_box3d(const BoxBEV& bev, double bottom, double h);

/// Object-local signs (along heading, across heading) of corner `index`.
/// Index 0 is (+, +); the sequence runs clockwise.
Vec2 corner_sign(int index);

struct Corner {
  double x = 0.0;
  double y = 0.0;
  double z_g = 0.0;  // ground height under the corner
  int index = 0;
  bool visible = true;

  Vec2 xy() const { return {x, y}; }
};

struct CornerSet {
  std::array<Corner, 4> corners{};

  /// Corner with the given index; throws InvalidCornerIndex if absent.
  const Corner& at_index(int index) const;
  int visible_count() const;
};

struct LidarPoint {
  float x = 0.0F;
  float y = 0.0F;
  float z = 0.0F;
  float r = 0.0F;  // reflectance
};

struct PointCloud {
  std::vector<LidarPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Maps `theta` into (-pi, pi]. Throws NonFinite for NaN/inf.
double canonicalize_yaw(double theta);

/// Corner positions of `box` ordered by index 0..3.
std::array<Vec2, 4> corner_points(const BoxBEV& box);

/// All four corners, marked visible with z_g = 0.
CornerSet corners_from_box(const BoxBEV& box);

/// Exact inverse of corners_from_box. Throws NotARectangle when the four
/// corners are not visible or deviate from a rectangle by more than
/// `tolerance` metres.
BoxBEV box_from_corners(const CornerSet& corners, double tolerance = 1e-6);

/// Area of a simple polygon (positive for counterclockwise order).
double signed_area(std::span<const Vec2> polygon);

/// Intersection of two convex polygons given in counterclockwise order.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject,
                              std::span<const Vec2> clip);

double bev_intersection_area(const BoxBEV& a, const BoxBEV& b);

/// Rotated-rectangle IoU in [0, 1].
double bev_iou(const BoxBEV& a, const BoxBEV& b);

/// Volumetric IoU of two yaw-only oriented boxes.
double iou3d(const Box3D& a, const Box3D& b);

/// Object-local coordinates of `p` relative to `box` (u along heading).
Vec2 to_box_frame(const BoxBEV& box, Vec2 p);

bool contains(const BoxBEV& box, Vec2 p);

}  // namespace cornerbox
