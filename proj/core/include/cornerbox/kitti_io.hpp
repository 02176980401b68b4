// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// KITTI-style dataset files: object labels, calibration, and point-cloud
// binaries, plus conversion between camera-frame labels and sensor-frame
// boxes. All text is parsed and written with '.' decimals regardless of the
// process locale.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cornerbox/geometry.hpp"
#include "cornerbox/recovery.hpp"
#include "cornerbox/weak_labels.hpp"

namespace cornerbox {

/// One object record: 15 whitespace-separated fields, optionally followed by
/// a detection score.
struct KittiLabel {
  std::string type;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  ImageBox bbox;
  double h = 0.0;  // dimensions, metres
  double w = 0.0;
  double l = 0.0;
  double x = 0.0;  // bottom centre, rectified camera frame
  double y = 0.0;
  double z = 0.0;
  double rotation_y = 0.0;
  std::optional<double> score;

  friend bool operator==(const KittiLabel&, const KittiLabel&) = default;
};

/// Throws MalformedRecord naming the 1-based line and the offending field.
std::vector<KittiLabel> parse_label_file(std::string_view text);
std::string serialize_labels(const std::vector<KittiLabel>& labels);

using Matrix34 = Eigen::Matrix<double, 3, 4>;

/// Raw matrices of a calibration file.
struct CalibComponents {
  std::array<std::optional<Matrix34>, 4> camera_projection;  // P0..P3
  std::optional<Eigen::Matrix3d> rectification;             // R0_rect
  std::optional<Matrix34> sensor_to_camera;                 // Tr_velo_to_cam
};

/// Composed sensor-frame -> pixel projection. The homogeneous scale of a
/// projected point (the third row's value) is its depth up to a factor.
struct Calib {
  ProjectionMatrix projection;
  /// Rigid sensor -> rectified camera transform; absent when the calib was
  /// built from a bare projection.
  std::optional<Eigen::Matrix4d> sensor_to_rect;
  std::optional<CalibComponents> components;
};

CalibComponents parse_calib_file(std::string_view text);
std::string serialize_calib(const CalibComponents& components);

/// P = camera_projection[camera] * R0_rect * Tr_velo_to_cam, lifted to 4x4
/// where needed. Throws MissingComponent.
Calib compose_projection(const CalibComponents& components, int camera = 2);

/// Calib from a projection matrix alone (no frame conversion available).
Calib calib_from_projection(const ProjectionMatrix& projection);

/// Pixel of a sensor-frame point; nullopt when it is not in front of the
/// camera.
std::optional<Vec2> project(const ProjectionMatrix& projection, const Eigen::Vector3d& point);

/// Bounding rectangle of the projected 3D box corners; nullopt if any corner
/// is behind the camera.
std::optional<ImageBox> project_box(const ProjectionMatrix& projection, const Box3D& box);

/// Camera-frame label -> sensor-frame centre box. Throws MissingComponent
/// when the calib has no rigid transform.
Box3D label_to_box3d(const KittiLabel& label, const Calib& calib);

/// Inverse of label_to_box3d. The image box is the projected box (or zeros
/// when not projectable); alpha is derived from the location.
KittiLabel box3d_to_label(const Box3D& box, const Calib& calib, std::string type = "Car");

/// Four little-endian float32 per point (x, y, z, reflectance). Throws
/// TruncatedFile when the length is not a multiple of 16.
PointCloud load_point_cloud(std::span<const std::byte> bytes);
std::vector<std::byte> serialize_point_cloud(const PointCloud& cloud);

std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

}  // namespace cornerbox
