// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// Box encodings: the centre-aligned baseline and five corner-aligned
// variants.
//
//   Center    (x_c, y_c, z_c, l, w, h, theta)
//   Corner    (x_o, y_o, N_o, l, w, theta)
//   DCorner   (x_o1, y_o1, x_o2, y_o2, N_o, theta)      diagonal corners
//   DSCorner  (x_o1, y_o1, x_o2, y_o2, N_o, l, w)       diagonal + size
//   FCorner   (x_o1, y_o1, ..., x_o4, y_o4)             all four corners
//   CCorner   (x_c, y_c, x_o, y_o, w)                   centre + one corner
//
// N_o names the (first) corner; for the diagonal schemes the second corner
// is N_o + 2 (mod 4). CCorner carries its corner index as metadata.
//
// The centre code is absolute. Detectors usually regress it as a residual
// against an anchor (x_a, y_a, z_a, l_a, w_a, h_a, theta_a) at voxel index
// (m_x, m_y, m_z, m_theta): box = anchor * ([m_x, m_y, m_z, 1, 1, 1, m_theta]
// + residual), with an objectness flag s_f alongside. That wrapping only
// matters for training and is not modelled here.

#pragma once

#include <array>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "cornerbox/geometry.hpp"

namespace cornerbox {

enum class Scheme { kCenter, kCorner, kDCorner, kDSCorner, kFCorner, kCCorner };

inline constexpr std::array<Scheme, 6> kAllSchemes = {
    Scheme::kCenter,   Scheme::kCorner,  Scheme::kDCorner,
    Scheme::kDSCorner, Scheme::kFCorner, Scheme::kCCorner};

std::string_view to_string(Scheme scheme);
/// Accepts the names printed by to_string, case-insensitively, with or
/// without a dash ("d-corner"). Throws UnsupportedScheme otherwise.
Scheme parse_scheme(std::string_view name);

struct CenterCode {
  double x = 0, y = 0, z = 0, l = 0, w = 0, h = 0, theta = 0;
};
struct CornerCode {
  double x = 0, y = 0;
  int index = 0;
  double l = 0, w = 0, theta = 0;
};
struct DCornerCode {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  int index = 0;
  double theta = 0;
};
struct DSCornerCode {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  int index = 0;
  double l = 0, w = 0;
};
struct FCornerCode {
  std::array<Vec2, 4> corners{};  // index order 0..3
};
struct CCornerCode {
  double xc = 0, yc = 0, xo = 0, yo = 0, w = 0;
  int index = 0;
};

struct EncodedBox {
  std::variant<CenterCode, CornerCode, DCornerCode, DSCornerCode, FCornerCode,
               CCornerCode>
      code;

  Scheme scheme() const { return static_cast<Scheme>(code.index()); }
};

/// Encodes `box`. `corner` picks N_o for the schemes that use one; it is
/// ignored by Center and FCorner. Throws InvalidCornerIndex.
EncodedBox encode(const BoxBEV& box, Scheme scheme, int corner = 0);
/// As above; the centre code also keeps z and h.
EncodedBox encode(const Box3D& box, Scheme scheme, int corner = 0);

/// Decoding tolerance for the DSCorner diagonal/size consistency check.
inline constexpr double kDiagonalTolerance = 0.05;

/// Recovers the BEV box. Throws InfeasibleGeometry when the code does not
/// describe a positive-size rectangle (CCorner with |corner - centre| < w/2,
/// DSCorner whose diagonal disagrees with hypot(l, w) by more than
/// kDiagonalTolerance, and so on). FCorner decodes exactly when the corners
/// form a rectangle and falls back to a least-squares fit otherwise.
BoxBEV decode(const EncodedBox& code);

/// One code per corner choice. Throws UnsupportedScheme for Center and
/// FCorner.
std::vector<EncodedBox> all_corner_variants(const BoxBEV& box, Scheme scheme);

/// Continuous parameter slots of a scheme, in tuple order (N_o excluded).
std::span<const std::string_view> slot_names(Scheme scheme);
/// True for slots measured in radians.
bool is_angle_slot(std::string_view name);
/// Position of `name` in slot_names(scheme); throws UnknownParameter.
std::size_t slot_position(Scheme scheme, std::string_view name);

double get_slot(const EncodedBox& code, std::size_t position);
void set_slot(EncodedBox& code, std::size_t position, double value);

}  // namespace cornerbox
