// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/codecs.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "cornerbox/error.hpp"
#include "cornerbox/recovery.hpp"

namespace cornerbox {

namespace {

constexpr std::array<std::string_view, 7> kCenterSlots = {"x_c", "y_c", "z_c", "l",
                                                          "w",   "h",   "theta"};
constexpr std::array<std::string_view, 5> kCornerSlots = {"x_o", "y_o", "l", "w", "theta"};
constexpr std::array<std::string_view, 5> kDCornerSlots = {"x_o1", "y_o1", "x_o2", "y_o2",
                                                           "theta"};
constexpr std::array<std::string_view, 6> kDSCornerSlots = {"x_o1", "y_o1", "x_o2",
                                                            "y_o2", "l",    "w"};
constexpr std::array<std::string_view, 8> kFCornerSlots = {
    "x_o1", "y_o1", "x_o2", "y_o2", "x_o3", "y_o3", "x_o4", "y_o4"};
constexpr std::array<std::string_view, 5> kCCornerSlots = {"x_c", "y_c", "x_o", "y_o", "w"};

void check_index(int corner) {
  if (corner < 0 || corner > 3) {
    throw Error(ErrorCode::kInvalidCornerIndex,
                "corner choice " + std::to_string(corner) + " not in 0..3");
  }
}

BoxBEV checked(BoxBEV box, const char* what) {
  if (!box.valid()) {
    throw Error(ErrorCode::kInfeasibleGeometry,
                std::string(what) + " decodes to a non-positive or non-finite box");
  }
  box.theta = canonicalize_yaw(box.theta);
  return box;
}

// Half-diagonal from the opposite corner towards `index`, in the box frame.
Vec2 local_corner(int index, double l, double w) {
  const Vec2 s = corner_sign(index);
  return {s.x * l / 2.0, s.y * w / 2.0};
}

BoxBEV decode_code(const CenterCode& c) {
  return checked({c.x, c.y, c.l, c.w, c.theta}, "center code");
}

BoxBEV decode_code(const CornerCode& c) {
  check_index(c.index);
  const Vec2 center = Vec2{c.x, c.y} - rotate(local_corner(c.index, c.l, c.w), c.theta);
  return checked({center.x, center.y, c.l, c.w, c.theta}, "corner code");
}

BoxBEV decode_code(const DCornerCode& c) {
  check_index(c.index);
  const Vec2 p1{c.x1, c.y1};
  const Vec2 p2{c.x2, c.y2};
  // p1 - p2 = R(theta) * (s_u * l, s_v * w) for the first corner's signs.
  const Vec2 local = rotate(p1 - p2, -c.theta);
  const Vec2 mid = (p1 + p2) * 0.5;
  return checked({mid.x, mid.y, std::abs(local.x), std::abs(local.y), c.theta},
                 "d-corner code");
}

BoxBEV decode_code(const DSCornerCode& c) {
  check_index(c.index);
  if (!(c.l > 0.0) || !(c.w > 0.0)) {
    throw Error(ErrorCode::kInfeasibleGeometry, "ds-corner size must be positive");
  }
  const Vec2 p1{c.x1, c.y1};
  const Vec2 p2{c.x2, c.y2};
  const Vec2 diag = p1 - p2;
  const double expected = std::hypot(c.l, c.w);
  if (std::abs(norm(diag) - expected) > kDiagonalTolerance) {
    throw Error(ErrorCode::kInfeasibleGeometry,
                "ds-corner diagonal " + std::to_string(norm(diag)) +
                    " m disagrees with size diagonal " + std::to_string(expected) + " m");
  }
  const Vec2 s = corner_sign(c.index);
  const double theta = bearing(diag) - std::atan2(s.y * c.w, s.x * c.l);
  const Vec2 mid = (p1 + p2) * 0.5;
  return checked({mid.x, mid.y, c.l, c.w, theta}, "ds-corner code");
}

BoxBEV decode_code(const FCornerCode& c) {
  CornerSet cs;
  for (int i = 0; i < 4; ++i) {
    cs.corners[i] = Corner{c.corners[i].x, c.corners[i].y, 0.0, i, true};
  }
  try {
    return box_from_corners(cs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotARectangle) throw;
  }
  std::vector<IndexedCorner> corners;
  for (int i = 0; i < 4; ++i) {
    corners.push_back({c.corners[i].x, c.corners[i].y, i});
  }
  try {
    return fit_rectangle(corners).box;
  } catch (const Error& e) {
    throw Error(ErrorCode::kInfeasibleGeometry,
                std::string("f-corner fit failed: ") + e.what());
  }
}

BoxBEV decode_code(const CCornerCode& c) {
  check_index(c.index);
  const Vec2 d = Vec2{c.xo, c.yo} - Vec2{c.xc, c.yc};
  const double half_w = c.w / 2.0;
  const double dd = dot(d, d) - half_w * half_w;
  if (!(c.w > 0.0) || !(dd > 0.0)) {
    throw Error(ErrorCode::kInfeasibleGeometry,
                "c-corner half-diagonal " + std::to_string(norm(d)) +
                    " m is not longer than half the width " + std::to_string(half_w));
  }
  const double half_l = std::sqrt(dd);
  const Vec2 s = corner_sign(c.index);
  const double theta = bearing(d) - std::atan2(s.y * half_w, s.x * half_l);
  return checked({c.xc, c.yc, 2.0 * half_l, c.w, theta}, "c-corner code");
}

template <typename Code, std::size_t N>
using MemberTable = std::array<double Code::*, N>;

// Slot accessors: member pointers in slot order.
constexpr MemberTable<CenterCode, 7> kCenterMembers = {
    &CenterCode::x, &CenterCode::y, &CenterCode::z,    &CenterCode::l,
    &CenterCode::w, &CenterCode::h, &CenterCode::theta};
constexpr MemberTable<CornerCode, 5> kCornerMembers = {
    &CornerCode::x, &CornerCode::y, &CornerCode::l, &CornerCode::w, &CornerCode::theta};
constexpr MemberTable<DCornerCode, 5> kDCornerMembers = {
    &DCornerCode::x1, &DCornerCode::y1, &DCornerCode::x2, &DCornerCode::y2,
    &DCornerCode::theta};
constexpr MemberTable<DSCornerCode, 6> kDSCornerMembers = {
    &DSCornerCode::x1, &DSCornerCode::y1, &DSCornerCode::x2,
    &DSCornerCode::y2, &DSCornerCode::l,  &DSCornerCode::w};
constexpr MemberTable<CCornerCode, 5> kCCornerMembers = {
    &CCornerCode::xc, &CCornerCode::yc, &CCornerCode::xo, &CCornerCode::yo,
    &CCornerCode::w};

template <typename Code, std::size_t N>
double& member_at(Code& code, const MemberTable<Code, N>& table, std::size_t position) {
  if (position >= N) {
    throw Error(ErrorCode::kUnknownParameter, "slot position out of range");
  }
  return code.*table[position];
}

double& slot_ref(EncodedBox& box, std::size_t position) {
  return std::visit(
      [position](auto& c) -> double& {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CenterCode>) {
          return member_at(c, kCenterMembers, position);
        } else if constexpr (std::is_same_v<T, CornerCode>) {
          return member_at(c, kCornerMembers, position);
        } else if constexpr (std::is_same_v<T, DCornerCode>) {
          return member_at(c, kDCornerMembers, position);
        } else if constexpr (std::is_same_v<T, DSCornerCode>) {
          return member_at(c, kDSCornerMembers, position);
        } else if constexpr (std::is_same_v<T, FCornerCode>) {
          if (position >= 8) {
            throw Error(ErrorCode::kUnknownParameter, "slot position out of range");
          }
          Vec2& v = c.corners[position / 2];
          return position % 2 == 0 ? v.x : v.y;
        } else {
          return member_at(c, kCCornerMembers, position);
        }
      },
      box.code);
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kCenter: return "center";
    case Scheme::kCorner: return "corner";
    case Scheme::kDCorner: return "d-corner";
    case Scheme::kDSCorner: return "ds-corner";
    case Scheme::kFCorner: return "f-corner";
    case Scheme::kCCorner: return "c-corner";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (ch == '-' || ch == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  for (Scheme s : kAllSchemes) {
    std::string canon;
    for (char ch : to_string(s)) {
      if (ch != '-') canon.push_back(ch);
    }
    if (key == canon) return s;
  }
  throw Error(ErrorCode::kUnsupportedScheme, "unknown scheme '" + std::string(name) + "'");
}

EncodedBox encode(const BoxBEV& box, Scheme scheme, int corner) {
  return encode(Box3D{box.x, box.y, 0.0, box.l, box.w, 0.0, box.theta}, scheme, corner);
}

EncodedBox encode(const Box3D& box3, Scheme scheme, int corner) {
  const BoxBEV box = box3.bev();
  const bool uses_index = scheme != Scheme::kCenter && scheme != Scheme::kFCorner;
  if (uses_index) check_index(corner);
  const auto pts = corner_points(box);
  switch (scheme) {
    case Scheme::kCenter:
      return {CenterCode{box3.x, box3.y, box3.z, box3.l, box3.w, box3.h, box3.theta}};
    case Scheme::kCorner:
      return {CornerCode{pts[corner].x, pts[corner].y, corner, box.l, box.w, box.theta}};
    case Scheme::kDCorner: {
      const Vec2 far = pts[(corner + 2) % 4];
      return {DCornerCode{pts[corner].x, pts[corner].y, far.x, far.y, corner, box.theta}};
    }
    case Scheme::kDSCorner: {
      const Vec2 far = pts[(corner + 2) % 4];
      return {DSCornerCode{pts[corner].x, pts[corner].y, far.x, far.y, corner, box.l, box.w}};
    }
    case Scheme::kFCorner:
      return {FCornerCode{pts}};
    case Scheme::kCCorner:
      return {CCornerCode{box.x, box.y, pts[corner].x, pts[corner].y, box.w, corner}};
  }
  throw Error(ErrorCode::kUnsupportedScheme, "unknown scheme");
}

BoxBEV decode(const EncodedBox& code) {
  return std::visit([](const auto& c) { return decode_code(c); }, code.code);
}

std::vector<EncodedBox> all_corner_variants(const BoxBEV& box, Scheme scheme) {
  if (scheme == Scheme::kCenter || scheme == Scheme::kFCorner) {
    throw Error(ErrorCode::kUnsupportedScheme,
                std::string(to_string(scheme)) + " has no corner choice");
  }
  std::vector<EncodedBox> out;
  for (int i = 0; i < 4; ++i) out.push_back(encode(box, scheme, i));
  return out;
}

std::span<const std::string_view> slot_names(Scheme scheme) {
  switch (scheme) {
    case Scheme::kCenter: return kCenterSlots;
    case Scheme::kCorner: return kCornerSlots;
    case Scheme::kDCorner: return kDCornerSlots;
    case Scheme::kDSCorner: return kDSCornerSlots;
    case Scheme::kFCorner: return kFCornerSlots;
    case Scheme::kCCorner: return kCCornerSlots;
  }
  return {};
}

bool is_angle_slot(std::string_view name) { return name == "theta"; }

std::size_t slot_position(Scheme scheme, std::string_view name) {
  const auto names = slot_names(scheme);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(ErrorCode::kUnknownParameter,
                "scheme " + std::string(to_string(scheme)) + " has no parameter '" +
                    std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

double get_slot(const EncodedBox& code, std::size_t position) {
  EncodedBox copy = code;
  return slot_ref(copy, position);
}

void set_slot(EncodedBox& code, std::size_t position, double value) {
  slot_ref(code, position) = value;
}

}  // namespace cornerbox
