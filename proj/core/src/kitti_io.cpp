// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/kitti_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "cornerbox/error.hpp"

namespace cornerbox {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line_no, line);
    if (end == text.size()) break;
    start = end + 1;
  }
}

Eigen::Matrix4d lift(const Matrix34& m) {
  Eigen::Matrix4d out = Eigen::Matrix4d::Identity();
  out.topRows<3>() = m;
  return out;
}

Eigen::Matrix4d lift(const Eigen::Matrix3d& r) {
  Eigen::Matrix4d out = Eigen::Matrix4d::Identity();
  out.topLeftCorner<3, 3>() = r;
  return out;
}

std::array<Eigen::Vector3d, 8> box_vertices(const Box3D& box) {
  const auto bev = corner_points(box.bev());
  std::array<Eigen::Vector3d, 8> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {bev[i].x, bev[i].y, box.bottom()};
    out[i + 4] = {bev[i].x, bev[i].y, box.top()};
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Labels

std::vector<KittiLabel> parse_label_file(std::string_view text) {
  std::vector<KittiLabel> out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto f = split_ws(line);
    if (f.empty()) return;
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 15 && f.size() != 16) {
      fail("expected 15 fields (16 with score), got " + std::to_string(f.size()));
    }
    auto num = [&](std::size_t i, const char* name) {
      const auto v = to_double(f[i]);
      if (!v) fail(std::string("field ") + std::to_string(i + 1) + " (" + name +
                   ") is not a number: '" + std::string(f[i]) + "'");
      return *v;
    };
    KittiLabel l;
    l.type = std::string(f[0]);
    l.truncated = num(1, "truncated");
    const auto occ = to_int(f[2]);
    if (!occ) fail("field 3 (occluded) is not an integer: '" + std::string(f[2]) + "'");
    l.occluded = *occ;
    l.alpha = num(3, "alpha");
    l.bbox = {num(4, "left"), num(5, "top"), num(6, "right"), num(7, "bottom")};
    l.h = num(8, "height");
    l.w = num(9, "width");
    l.l = num(10, "length");
    l.x = num(11, "x");
    l.y = num(12, "y");
    l.z = num(13, "z");
    l.rotation_y = num(14, "rotation_y");
    if (f.size() == 16) l.score = num(15, "score");
    out.push_back(std::move(l));
  });
  return out;
}

std::string serialize_labels(const std::vector<KittiLabel>& labels) {
  std::string out;
  for (const auto& l : labels) {
    const double fields[] = {l.truncated, static_cast<double>(l.occluded), l.alpha,
                             l.bbox.u_min, l.bbox.v_min, l.bbox.u_max, l.bbox.v_max,
                             l.h, l.w, l.l, l.x, l.y, l.z, l.rotation_y};
    out += l.type;
    for (std::size_t i = 0; i < std::size(fields); ++i) {
      out += ' ';
      out += i == 1 ? std::to_string(l.occluded) : format_double(fields[i]);
    }
    if (l.score) {
      out += ' ';
      out += format_double(*l.score);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration

CalibComponents parse_calib_file(std::string_view text) {
  std::map<std::string, std::vector<double>, std::less<>> entries;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      if (!split_ws(line).empty()) {
        throw Error(ErrorCode::kMalformedRecord,
                    "calib line " + std::to_string(line_no) + ": missing ':'");
      }
      return;
    }
    const auto key_fields = split_ws(line.substr(0, colon));
    if (key_fields.size() != 1) {
      throw Error(ErrorCode::kMalformedRecord,
                  "calib line " + std::to_string(line_no) + ": bad key");
    }
    std::vector<double> values;
    for (auto tok : split_ws(line.substr(colon + 1))) {
      const auto v = to_double(tok);
      if (!v) {
        throw Error(ErrorCode::kMalformedRecord, "calib line " + std::to_string(line_no) +
                                                     ": not a number '" + std::string(tok) + "'");
      }
      values.push_back(*v);
    }
    entries[std::string(key_fields[0])] = std::move(values);
  });

  auto matrix34 = [&](std::string_view key) -> std::optional<Matrix34> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    if (it->second.size() != 12) {
      throw Error(ErrorCode::kMalformedRecord,
                  std::string(key) + ": expected 12 values, got " +
                      std::to_string(it->second.size()));
    }
    Matrix34 m;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) m(r, c) = it->second[static_cast<std::size_t>(r * 4 + c)];
    }
    return m;
  };

  CalibComponents out;
  for (int i = 0; i < 4; ++i) {
    out.camera_projection[static_cast<std::size_t>(i)] = matrix34("P" + std::to_string(i));
  }
  out.sensor_to_camera = matrix34("Tr_velo_to_cam");
  if (!out.sensor_to_camera) out.sensor_to_camera = matrix34("Tr_velo_cam");
  for (const char* key : {"R0_rect", "R_rect"}) {
    const auto it = entries.find(key);
    if (it == entries.end()) continue;
    if (it->second.size() != 9) {
      throw Error(ErrorCode::kMalformedRecord,
                  std::string(key) + ": expected 9 values, got " +
                      std::to_string(it->second.size()));
    }
    Eigen::Matrix3d r;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) r(a, b) = it->second[static_cast<std::size_t>(a * 3 + b)];
    }
    out.rectification = r;
    break;
  }
  return out;
}

std::string serialize_calib(const CalibComponents& c) {
  std::string out;
  auto emit = [&](const std::string& key, const auto& m) {
    out += key + ':';
    for (int r = 0; r < m.rows(); ++r) {
      for (int k = 0; k < m.cols(); ++k) out += ' ' + format_double(m(r, k));
    }
    out += '\n';
  };
  for (int i = 0; i < 4; ++i) {
    if (const auto& p = c.camera_projection[static_cast<std::size_t>(i)]) {
      emit("P" + std::to_string(i), *p);
    }
  }
  if (c.rectification) emit("R0_rect", *c.rectification);
  if (c.sensor_to_camera) emit("Tr_velo_to_cam", *c.sensor_to_camera);
  return out;
}

Calib compose_projection(const CalibComponents& components, int camera) {
  if (camera < 0 || camera > 3) {
    throw Error(ErrorCode::kInvalidArgument, "camera index must be 0..3");
  }
  const auto& p = components.camera_projection[static_cast<std::size_t>(camera)];
  if (!p) {
    throw Error(ErrorCode::kMissingComponent, "P" + std::to_string(camera) + " not present");
  }
  if (!components.rectification) {
    throw Error(ErrorCode::kMissingComponent, "R0_rect not present");
  }
  if (!components.sensor_to_camera) {
    throw Error(ErrorCode::kMissingComponent, "Tr_velo_to_cam not present");
  }
  const Eigen::Matrix4d to_rect = lift(*components.rectification) * lift(*components.sensor_to_camera);
  Calib calib;
  calib.projection = *p * to_rect;
  calib.sensor_to_rect = to_rect;
  calib.components = components;
  if (calib.projection.row(2).head<3>().isZero()) {
    throw Error(ErrorCode::kInvalidArgument, "projection has no depth row");
  }
  return calib;
}

Calib calib_from_projection(const ProjectionMatrix& projection) {
  Calib calib;
  calib.projection = projection;
  return calib;
}

std::optional<Vec2> project(const ProjectionMatrix& P, const Eigen::Vector3d& point) {
  const Eigen::Vector3d h = P * point.homogeneous();
  if (!(h.z() > 0.0)) return std::nullopt;
  return Vec2{h.x() / h.z(), h.y() / h.z()};
}

std::optional<ImageBox> project_box(const ProjectionMatrix& P, const Box3D& box) {
  ImageBox out{1e300, 1e300, -1e300, -1e300};
  for (const auto& v : box_vertices(box)) {
    const auto px = project(P, v);
    if (!px) return std::nullopt;
    out.u_min = std::min(out.u_min, px->x);
    out.v_min = std::min(out.v_min, px->y);
    out.u_max = std::max(out.u_max, px->x);
    out.v_max = std::max(out.v_max, px->y);
  }
  return out;
}

Box3D label_to_box3d(const KittiLabel& label, const Calib& calib) {
  if (!calib.sensor_to_rect) {
    throw Error(ErrorCode::kMissingComponent, "calib lacks the sensor-to-camera transform");
  }
  const Eigen::Matrix4d to_sensor = calib.sensor_to_rect->inverse();
  // Camera y points down; the label location is the bottom face centre.
  const Eigen::Vector3d center_cam{label.x, label.y - label.h / 2.0, label.z};
  const Eigen::Vector3d center = (to_sensor * center_cam.homogeneous()).head<3>();
  // Object heading in the camera frame for rotation about camera y.
  const Eigen::Vector3d heading_cam{std::cos(label.rotation_y), 0.0, -std::sin(label.rotation_y)};
  const Eigen::Vector3d heading = to_sensor.topLeftCorner<3, 3>() * heading_cam;
  return {center.x(), center.y(), center.z(), label.l, label.w, label.h,
          canonicalize_yaw(std::atan2(heading.y(), heading.x()))};
}

KittiLabel box3d_to_label(const Box3D& box, const Calib& calib, std::string type) {
  if (!calib.sensor_to_rect) {
    throw Error(ErrorCode::kMissingComponent, "calib lacks the sensor-to-camera transform");
  }
  const Eigen::Matrix4d& to_rect = *calib.sensor_to_rect;
  const Eigen::Vector3d center =
      (to_rect * Eigen::Vector3d{box.x, box.y, box.z}.homogeneous()).head<3>();
  // Invert the yaw map of label_to_box3d exactly: the sensor-plane heading
  // of rotation_y is M * (cos ry, -sin ry), with M the camera x/z columns
  // of the inverse rotation restricted to sensor x/y.
  const Eigen::Matrix3d back = to_rect.inverse().topLeftCorner<3, 3>();
  Eigen::Matrix2d m;
  m << back(0, 0), back(0, 2), back(1, 0), back(1, 2);
  const Eigen::Vector2d v = m.inverse() * Eigen::Vector2d{std::cos(box.theta), std::sin(box.theta)};
  KittiLabel l;
  l.type = std::move(type);
  l.h = box.h;
  l.w = box.w;
  l.l = box.l;
  l.x = center.x();
  l.y = center.y() + box.h / 2.0;
  l.z = center.z();
  l.rotation_y = canonicalize_yaw(std::atan2(-v.y(), v.x()));
  l.alpha = canonicalize_yaw(l.rotation_y - std::atan2(l.x, l.z));
  if (const auto ib = project_box(calib.projection, box)) l.bbox = *ib;
  return l;
}

// ---------------------------------------------------------------------------
// Point clouds and files

PointCloud load_point_cloud(std::span<const std::byte> bytes) {
  constexpr std::size_t kStride = 4 * sizeof(float);
  if (bytes.size() % kStride != 0) {
    throw Error(ErrorCode::kTruncatedFile, "point cloud length " + std::to_string(bytes.size()) +
                                               " is not a multiple of 16 bytes");
  }
  PointCloud cloud;
  cloud.points.resize(bytes.size() / kStride);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    std::array<float, 4> v;
    for (std::size_t k = 0; k < 4; ++k) {
      std::uint32_t raw;
      std::memcpy(&raw, bytes.data() + i * kStride + k * 4, 4);
      if constexpr (std::endian::native == std::endian::big) raw = __builtin_bswap32(raw);
      v[k] = std::bit_cast<float>(raw);
    }
    cloud.points[i] = {v[0], v[1], v[2], v[3]};
  }
  return cloud;
}

std::vector<std::byte> serialize_point_cloud(const PointCloud& cloud) {
  std::vector<std::byte> out(cloud.size() * 16);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    const float v[4] = {p.x, p.y, p.z, p.r};
    for (std::size_t k = 0; k < 4; ++k) {
      auto raw = std::bit_cast<std::uint32_t>(v[k]);
      if constexpr (std::endian::native == std::endian::big) raw = __builtin_bswap32(raw);
      std::memcpy(out.data() + i * 16 + k * 4, &raw, 4);
    }
  }
  return out;
}

std::vector<std::byte> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> out(size);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(size));
  if (!in) throw Error(ErrorCode::kIo, "short read on " + path.string());
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "rename to " + path.string() + " failed: " + ec.message());
}

}  // namespace cornerbox
