// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/geometry.hpp"

#include <algorithm>
#include <string>

#include "cornerbox/error.hpp"

namespace cornerbox {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

// Corner loop of `box` in counterclockwise order (indices 3, 2, 1, 0).
std::array<Vec2, 4> ccw_loop(const BoxBEV& box) {
  const auto pts = corner_points(box);
  return {pts[3], pts[2], pts[1], pts[0]};
}

}  // namespace

bool BoxBEV::valid() const {
  return finite_all({x, y, theta}) && finite_positive(l) && finite_positive(w);
}

bool Box3D::valid() const {
  return finite_all({x, y, z, theta}) && finite_positive(l) &&
         finite_positive(w) && finite_positive(h);
}

Box3D make_box3d(const BoxBEV& bev, double bottom, double h) {
  return {bev.x, bev.y, bottom + h / 2.0, bev.l, bev.w, h, bev.theta};
}

Vec2 corner_sign(int index) {
  switch (index) {
    case 0: return {1.0, 1.0};
    case 1: return {1.0, -1.0};
    case 2: return {-1.0, -1.0};
    case 3: return {-1.0, 1.0};
    default:
      throw Error(ErrorCode::kInvalidCornerIndex,
                  "corner index " + std::to_string(index) + " not in 0..3");
  }
}

const Corner& CornerSet::at_index(int index) const {
  for (const auto& c : corners) {
    if (c.index == index) return c;
  }
  throw Error(ErrorCode::kInvalidCornerIndex,
              "no corner with index " + std::to_string(index));
}

int CornerSet::visible_count() const {
  return static_cast<int>(std::count_if(corners.begin(), corners.end(),
                                        [](const Corner& c) { return c.visible; }));
}

double canonicalize_yaw(double theta) {
  if (!std::isfinite(theta)) {
    throw Error(ErrorCode::kNonFinite, "yaw is not finite");
  }
  double t = std::remainder(theta, 2.0 * kPi);
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

std::array<Vec2, 4> corner_points(const BoxBEV& box) {
  const double c = std::cos(box.theta);
  const double s = std::sin(box.theta);
  const double hl = box.l / 2.0;
  const double hw = box.w / 2.0;
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; ++i) {
    const Vec2 sign = corner_sign(i);
    const double u = sign.x * hl;
    const double v = sign.y * hw;
    out[i] = {box.x + c * u - s * v, box.y + s * u + c * v};
  }
  return out;
}

CornerSet corners_from_box(const BoxBEV& box) {
  const auto pts = corner_points(box);
  CornerSet cs;
  for (int i = 0; i < 4; ++i) {
    cs.corners[i] = Corner{pts[i].x, pts[i].y, 0.0, i, true};
  }
  return cs;
}

BoxBEV box_from_corners(const CornerSet& cs, double tolerance) {
  std::array<Vec2, 4> p;
  std::array<bool, 4> seen{};
  for (const auto& c : cs.corners) {
    if (c.index < 0 || c.index > 3 || seen[c.index]) {
      throw Error(ErrorCode::kInvalidCornerIndex,
                  "corner indices must be a permutation of 0..3");
    }
    if (!c.visible) {
      throw Error(ErrorCode::kNotARectangle,
                  "corner " + std::to_string(c.index) + " is not visible");
    }
    seen[c.index] = true;
    p[c.index] = c.xy();
  }

  const Vec2 front_mid = (p[0] + p[1]) * 0.5;
  const Vec2 back_mid = (p[3] + p[2]) * 0.5;
  const Vec2 left_mid = (p[0] + p[3]) * 0.5;
  const Vec2 right_mid = (p[1] + p[2]) * 0.5;
  const Vec2 center = (p[0] + p[1] + p[2] + p[3]) * 0.25;

  BoxBEV box;
  box.x = center.x;
  box.y = center.y;
  box.l = norm(front_mid - back_mid);
  box.w = norm(left_mid - right_mid);
  if (box.l <= tolerance || box.w <= tolerance) {
    throw Error(ErrorCode::kNotARectangle, "corners span zero length or width");
  }
  box.theta = canonicalize_yaw(bearing(front_mid - back_mid));

  // Reconstruct and compare corner by corner; this catches unequal edges,
  // skew, and counterclockwise (mirrored) index order alike.
  const auto rebuilt = corner_points(box);
  double deviation = 0.0;
  for (int i = 0; i < 4; ++i) {
    deviation = std::max(deviation, norm(rebuilt[i] - p[i]));
  }
  if (!(deviation <= tolerance)) {
    throw Error(ErrorCode::kNotARectangle,
                "corner deviation " + std::to_string(deviation) +
                    " m exceeds tolerance");
  }
  return box;
}

double signed_area(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % n]);
  }
  return twice / 2.0;
}

std::vector<Vec2> clip_convex(std::span<const Vec2> subject,
                              std::span<const Vec2> clip) {
  std::vector<Vec2> output(subject.begin(), subject.end());
  std::vector<Vec2> input;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 edge = clip[(e + 1) % m] - a;
    input.swap(output);
    output.clear();
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 cur = input[i];
      const Vec2 prev = input[(i + n - 1) % n];
      const double d_cur = cross(edge, cur - a);
      const double d_prev = cross(edge, prev - a);
      const bool in_cur = d_cur >= 0.0;
      const bool in_prev = d_prev >= 0.0;
      if (in_cur != in_prev) {
        const double t = d_prev / (d_prev - d_cur);
        output.push_back(prev + (cur - prev) * t);
      }
      if (in_cur) output.push_back(cur);
    }
  }
  return output;
}

double bev_intersection_area(const BoxBEV& a, const BoxBEV& b) {
  // Cheap rejection on circumscribed circles.
  const double ra = std::hypot(a.l, a.w) / 2.0;
  const double rb = std::hypot(b.l, b.w) / 2.0;
  if (norm(a.center() - b.center()) > ra + rb) return 0.0;

  const auto pa = ccw_loop(a);
  const auto pb = ccw_loop(b);
  const auto poly = clip_convex(pa, pb);
  return std::max(0.0, signed_area(poly));
}

double bev_iou(const BoxBEV& a, const BoxBEV& b) {
  const double inter = bev_intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou3d(const Box3D& a, const Box3D& b) {
  const double overlap_h =
      std::min(a.top(), b.top()) - std::max(a.bottom(), b.bottom());
  if (overlap_h <= 0.0) return 0.0;
  const double inter = bev_intersection_area(a.bev(), b.bev()) * overlap_h;
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Vec2 to_box_frame(const BoxBEV& box, Vec2 p) {
  return rotate(p - box.center(), -box.theta);
}

bool contains(const BoxBEV& box, Vec2 p) {
  const Vec2 q = to_box_frame(box, p);
  return std::abs(q.x) <= box.l / 2.0 && std::abs(q.y) <= box.w / 2.0;
}

}  // namespace cornerbox
