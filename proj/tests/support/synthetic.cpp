// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthetic.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

namespace cornerbox::testing {

namespace fs = std::filesystem;

CalibComponents kitti_like_components() {
  CalibComponents c;
  Matrix34 p2;
  p2 << 721.5377, 0.0, 609.5593, 44.85728,  //
      0.0, 721.5377, 172.854, 0.2163791,    //
      0.0, 0.0, 1.0, 0.002745884;
  Matrix34 p0 = p2;
  p0.col(3).setZero();
  c.camera_projection = {p0, p0, p2, p2};
  c.camera_projection[3]->col(3) << -339.5242, 2.199936, 0.002729905;

  // Small rotations composed onto the axis permutation so the matrices are
  // exactly orthonormal.
  const Eigen::Matrix3d r0 =
      (Eigen::AngleAxisd(0.0098, Eigen::Vector3d::UnitX()) *
       Eigen::AngleAxisd(-0.0099, Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(0.0074, Eigen::Vector3d::UnitZ()))
          .toRotationMatrix();
  c.rectification = r0;

  Eigen::Matrix3d axes;
  axes << 0.0, -1.0, 0.0,  //
      0.0, 0.0, -1.0,      //
      1.0, 0.0, 0.0;
  const Eigen::Matrix3d tilt = (Eigen::AngleAxisd(0.0148, Eigen::Vector3d::UnitX()) *
                                Eigen::AngleAxisd(0.0075, Eigen::Vector3d::UnitY()))
                                   .toRotationMatrix();
  Matrix34 tr;
  tr.leftCols<3>() = tilt * axes;
  tr.col(3) << -0.004069766, -0.07631618, -0.2717806;
  c.sensor_to_camera = tr;
  return c;
}

namespace {

// Slab test in the box frame; returns the entry distance along the ray.
std::optional<double> hit_box(const Box3D& b, const Eigen::Vector3d& dir) {
  const double c = std::cos(-b.theta);
  const double s = std::sin(-b.theta);
  const Eigen::Vector3d o{c * (-b.x) - s * (-b.y), s * (-b.x) + c * (-b.y), -b.z};
  const Eigen::Vector3d d{c * dir.x() - s * dir.y(), s * dir.x() + c * dir.y(), dir.z()};
  const Eigen::Vector3d half{b.l / 2.0, b.w / 2.0, b.h / 2.0};
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (std::abs(o[k]) > half[k]) return std::nullopt;
      continue;
    }
    double ta = (-half[k] - o[k]) / d[k];
    double tb = (half[k] - o[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 <= 0.0) return std::nullopt;
  return t0;
}

}  // namespace

PointCloud ray_cast(const std::vector<Box3D>& boxes, double ground_z, const SceneOptions& o) {
  PointCloud cloud;
  constexpr double kDeg = kPi / 180.0;
  const int steps = static_cast<int>(std::lround(2.0 * o.azimuth_half_span_deg / o.azimuth_step_deg));
  for (int beam = 0; beam < o.beams; ++beam) {
    const double el =
        (o.top_elevation_deg +
         (o.bottom_elevation_deg - o.top_elevation_deg) * beam / static_cast<double>(o.beams - 1)) *
        kDeg;
    for (int k = 0; k <= steps; ++k) {
      const double az = (-o.azimuth_half_span_deg + k * o.azimuth_step_deg) * kDeg;
      const Eigen::Vector3d dir{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                                std::sin(el)};
      double best = o.max_ray;
      bool hit = false;
      if (dir.z() < 0.0) {
        const double t = ground_z / dir.z();
        if (t < best) {
          best = t;
          hit = true;
        }
      }
      for (const auto& b : boxes) {
        if (const auto t = hit_box(b, dir); t && *t < best) {
          best = *t;
          hit = true;
        }
      }
      if (!hit) continue;
      const Eigen::Vector3d p = dir * best;
      cloud.points.push_back({static_cast<float>(p.x()), static_cast<float>(p.y()),
                              static_cast<float>(p.z()), 0.5f});
    }
  }
  return cloud;
}

BoxBEV random_box(std::mt19937_64& rng, double extent) {
  std::uniform_real_distribution<double> pos(-extent, extent);
  std::uniform_real_distribution<double> len(3.5, 4.8);
  std::uniform_real_distribution<double> wid(1.5, 1.9);
  std::uniform_real_distribution<double> yaw(-kPi, kPi);
  const double x = pos(rng);
  const double y = pos(rng);
  const double l = len(rng);
  const double w = wid(rng);
  return {x, y, l, w, canonicalize_yaw(yaw(rng))};
}

SyntheticFrame make_frame(std::uint64_t seed, int index, const SceneOptions& o) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(index), std::uint64_t{0x5eed}};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> count(o.min_objects, o.max_objects);
  std::uniform_real_distribution<double> range(o.min_range, o.max_range);
  std::uniform_real_distribution<double> bearing(-o.max_bearing_deg, o.max_bearing_deg);
  std::uniform_real_distribution<double> yaw(-kPi, kPi);
  std::uniform_real_distribution<double> len(3.5, 4.8);
  std::uniform_real_distribution<double> wid(1.5, 1.9);
  std::uniform_real_distribution<double> hgt(1.4, 1.7);

  SyntheticFrame f;
  char id[16];
  std::snprintf(id, sizeof(id), "%06d", index);
  f.id = id;
  f.components = kitti_like_components();
  f.calib = compose_projection(f.components, 2);

  const int n = count(rng);
  for (int attempt = 0; attempt < 400 && static_cast<int>(f.boxes.size()) < n; ++attempt) {
    const double r = range(rng);
    const double b = bearing(rng) * kPi / 180.0;
    const double h = hgt(rng);
    const BoxBEV bev{r * std::cos(b), r * std::sin(b), len(rng), wid(rng),
                     canonicalize_yaw(yaw(rng))};
    // Keep a clear margin to every other car.
    const BoxBEV padded{bev.x, bev.y, bev.l + 1.0, bev.w + 1.0, bev.theta};
    const bool overlaps = std::any_of(f.boxes.begin(), f.boxes.end(), [&](const Box3D& other) {
      return bev_intersection_area(padded, other.bev()) > 0.0;
    });
    if (overlaps) continue;
    const Box3D box = make_box3d(bev, kGroundZ, h);
    if (!project_box(f.calib.projection, box)) continue;
    f.boxes.push_back(box);
  }
  for (const auto& box : f.boxes) {
    KittiLabel l = box3d_to_label(box, f.calib, "Car");
    // Written labels carry serialized values; keep the in-memory copy equal.
    f.labels.push_back(l);
  }
  f.labels = parse_label_file(serialize_labels(f.labels));
  f.cloud = ray_cast(f.boxes, kGroundZ, o);
  return f;
}

std::vector<SyntheticFrame> make_dataset(std::uint64_t seed, int frames, const SceneOptions& o) {
  std::vector<SyntheticFrame> out;
  out.reserve(static_cast<std::size_t>(frames));
  for (int i = 0; i < frames; ++i) out.push_back(make_frame(seed, i, o));
  return out;
}

void write_dataset(const fs::path& root, const std::vector<SyntheticFrame>& frames) {
  fs::create_directories(root / "label_2");
  fs::create_directories(root / "velodyne");
  fs::create_directories(root / "calib");
  for (const auto& f : frames) {
    write_file_atomic(root / "label_2" / (f.id + ".txt"), serialize_labels(f.labels));
    const auto bytes = serialize_point_cloud(f.cloud);
    write_file_atomic(root / "velodyne" / (f.id + ".bin"),
                      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    write_file_atomic(root / "calib" / (f.id + ".txt"), serialize_calib(f.components));
  }
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("cornerbox_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace cornerbox::testing
