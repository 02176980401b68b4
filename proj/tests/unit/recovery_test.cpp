// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "cornerbox/error.hpp"
#include "cornerbox/kitti_io.hpp"
#include "cornerbox/recovery.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace cornerbox {
namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

std::vector<IndexedCorner> exact(const BoxBEV& b, std::initializer_list<int> idx) {
  const auto pts = corner_points(b);
  std::vector<IndexedCorner> out;
  for (int k : idx) out.push_back({pts[k].x, pts[k].y, k});
  return out;
}

void expect_box(const BoxBEV& got, const BoxBEV& want, double tol) {
  EXPECT_NEAR(got.x, want.x, tol);
  EXPECT_NEAR(got.y, want.y, tol);
  EXPECT_NEAR(got.l, want.l, tol);
  EXPECT_NEAR(got.w, want.w, tol);
  EXPECT_NEAR(std::remainder(got.theta - want.theta, 2 * kPi), 0.0, tol);
}

TEST(FitRectangle, ExactFourCorners) {
  const BoxBEV b{10, 5, 4, 2, 0.3};
  const auto fit = fit_rectangle(exact(b, {0, 1, 2, 3}));
  expect_box(fit.box, b, 1e-9);
  EXPECT_TRUE(fit.length_determined);
  EXPECT_TRUE(fit.width_determined);
  EXPECT_LT(fit.objective, 1e-18);
}

TEST(FitRectangle, ExactThreeCorners) {
  const BoxBEV b{10, 5, 4, 2, 0.3};
  expect_box(fit_rectangle(exact(b, {0, 1, 2})).box, b, 1e-9);
}

TEST(FitRectangle, ExactSubsetsOfRandomBoxes) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const BoxBEV b = testing::random_box(rng);
    for (auto idx : {std::initializer_list<int>{0, 1, 2}, {1, 2, 3}, {2, 3, 0}, {3, 0, 1}}) {
      expect_box(fit_rectangle(exact(b, idx)).box, b, 1e-9);
    }
    // Adjacent pairs with the missing dimension supplied.
    const auto side = fit_rectangle(exact(b, {0, 3}), {std::nullopt, b.w});
    expect_box(side.box, b, 1e-9);
    EXPECT_TRUE(side.length_determined);
    EXPECT_FALSE(side.width_determined);
    const auto rear = fit_rectangle(exact(b, {2, 3}), {b.l, std::nullopt});
    expect_box(rear.box, b, 1e-9);
    EXPECT_FALSE(rear.length_determined);
    EXPECT_TRUE(rear.width_determined);
    expect_box(fit_rectangle(exact(b, {1, 3}), {b.l, b.w}).box, b, 1e-9);
  }
}

TEST(FitRectangle, TwoCornersDefaultExtent) {
  const auto fit = fit_rectangle(exact({10, 5, 4, 2, 0}, {0, 1}));
  EXPECT_NEAR(fit.box.l, kDefaultExtent, 1e-12);
  EXPECT_NEAR(fit.box.w, 2.0, 1e-9);
  EXPECT_NEAR(fit.box.x, 12.0 - kDefaultExtent / 2, 1e-9);
  EXPECT_FALSE(fit.length_determined);
}

TEST(FitRectangle, PerturbedMatchesGridSearch) {
  const BoxBEV b{10, 5, 4, 2, 0.3};
  auto c = exact(b, {0, 1, 2, 3});
  c[1].x += 0.1;
  const auto fit = fit_rectangle(c);
  const BoxBEV ref = oracle::grid_search_fit(c, b);
  expect_box(fit.box, ref, 1e-3);
  EXPECT_LE(fit.objective, oracle::fit_objective(ref, c) + 1e-12);
}

TEST(FitRectangle, NoisyOptimumBeatsTruth) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int i = 0; i < 500; ++i) {
    const BoxBEV b = testing::random_box(rng);
    auto c = exact(b, {0, 1, 2, 3});
    if (i % 2) c.pop_back();
    for (auto& p : c) {
      p.x += noise(rng);
      p.y += noise(rng);
    }
    const auto fit = fit_rectangle(c);
    EXPECT_LE(fit.objective, oracle::fit_objective(b, c) + 1e-12);
    EXPECT_NEAR(fit.objective, oracle::fit_objective(fit.box, c), 1e-9);
  }
}

TEST(FitRectangle, Errors) {
  EXPECT_EQ(code_of([] { fit_rectangle({{1, 1, 0}}); }), ErrorCode::kUnderdetermined);
  EXPECT_EQ(code_of([] { fit_rectangle({{1, 1, 0}, {1, 1, 1}}); }), ErrorCode::kDegenerate);
  EXPECT_EQ(code_of([] { fit_rectangle({{1, 1, 0}, {3, 3, 2}}); }), ErrorCode::kUnderdetermined);
  EXPECT_EQ(code_of([] { fit_rectangle({{1, 1, 0}, {3, 3, 0}}); }),
            ErrorCode::kInvalidCornerIndex);
  EXPECT_EQ(code_of([] { fit_rectangle({{1, 1, 0}, {3, 3, 5}}); }),
            ErrorCode::kInvalidCornerIndex);
}

TEST(Cluster, FourExactCorners) {
  const BoxBEV b{10, 5, 4, 2, 0};
  std::vector<CornerObservation> obs;
  for (const auto& c : exact(b, {0, 1, 2, 3})) obs.push_back({c.x, c.y, c.index, 0.9});
  const auto props = cluster_corners(obs);
  ASSERT_EQ(props.size(), 1u);
  EXPECT_EQ(props[0].source, ProposalSource::kFitted);
  expect_box(props[0].bev, b, 1e-9);
  EXPECT_EQ(props[0].member_corner_ids.size(), 4u);
}

TEST(Cluster, LoneCornerFallsBack) {
  const auto props = cluster_corners({{12, 6, 0, 0.8}});
  ASSERT_EQ(props.size(), 1u);
  EXPECT_EQ(props[0].source, ProposalSource::kFallbackRegion);
  EXPECT_DOUBLE_EQ(props[0].bev.x, 12);
  EXPECT_DOUBLE_EQ(props[0].bev.y, 6);
  EXPECT_DOUBLE_EQ(props[0].bev.l, 6);
  EXPECT_DOUBLE_EQ(props[0].bev.w, 6);
  EXPECT_DOUBLE_EQ(props[0].bev.theta, 0);
}

TEST(Cluster, EmptyInput) { EXPECT_TRUE(cluster_corners({}).empty()); }

TEST(Cluster, TwoObjectsMatchPartitionOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    BoxBEV a = testing::random_box(rng, 1.0);
    BoxBEV b = testing::random_box(rng, 1.0);
    b.x = a.x + 20.0;
    std::vector<CornerObservation> obs;
    std::vector<oracle::ClusterCentroid> cents;
    std::uniform_int_distribution<int> drop(0, 3);
    for (const BoxBEV& box : {a, b}) {
      const int skip = drop(rng);
      const auto pts = corner_points(box);
      for (int k = 0; k < 4; ++k) {
        if (k == skip) continue;
        obs.push_back({pts[k].x, pts[k].y, k, 0.9});
        cents.push_back({pts[k].x, pts[k].y, k});
      }
    }
    const auto groups = oracle::best_partition(cents, 6.0);
    ASSERT_EQ(groups.size(), 2u);
    const auto props = cluster_corners(obs);
    ASSERT_EQ(props.size(), 2u);
    for (const auto& p : props) {
      EXPECT_EQ(p.source, ProposalSource::kFitted);
      auto ids = p.member_corner_ids;
      std::sort(ids.begin(), ids.end());
      EXPECT_TRUE(std::find(groups.begin(), groups.end(), ids) != groups.end());
    }
    expect_box(props[0].bev, a, 1e-9);
    expect_box(props[1].bev, b, 1e-9);
  }
}

TEST(Cluster, PermutationInvariant) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> jitter(0.0, 0.05);
  std::uniform_real_distribution<double> score(0.3, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<CornerObservation> obs;
    for (int o = 0; o < 4; ++o) {
      BoxBEV box = testing::random_box(rng, 1.0);
      box.x += 12.0 * o;
      const auto pts = corner_points(box);
      for (int k = 0; k < 4; ++k) {
        for (int rep = 0; rep < 3; ++rep) {
          obs.push_back({pts[k].x + jitter(rng), pts[k].y + jitter(rng), k, score(rng)});
        }
      }
    }
    obs.push_back({100, 100, 2, 0.5});
    const auto ref = cluster_corners(obs);
    for (int p = 0; p < 5; ++p) {
      auto shuffled = obs;
      std::vector<std::size_t> perm(obs.size());
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = obs[perm[i]];
      const auto got = cluster_corners(shuffled);
      ASSERT_EQ(got.size(), ref.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        expect_box(got[i].bev, ref[i].bev, 1e-9);
        EXPECT_EQ(got[i].source, ref[i].source);
      }
    }
  }
}

TEST(GroundPlane, FlatCloud) {
  PointCloud cloud;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) cloud.points.push_back({float(i), float(j - 10), 0.0f, 0.0f});
  }
  const GroundPlane g = fit_ground_plane(cloud);
  EXPECT_NEAR(g.a, 0, 1e-9);
  EXPECT_NEAR(g.b, 0, 1e-9);
  EXPECT_NEAR(g.c, 1, 1e-9);
  EXPECT_NEAR(g.d, 0, 1e-9);
}

TEST(GroundPlane, OutliersMatchExhaustiveOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xy(-10.0, 10.0);
  PointCloud cloud;
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 50; ++i) {
    const double z = i % 10 == 0 ? 5.0 : 0.0;
    const double x = xy(rng);
    const double y = xy(rng);
    cloud.points.push_back({float(x), float(y), float(z), 0.0f});
    pts.push_back({double(float(x)), double(float(y)), z});
  }
  const GroundPlane g = fit_ground_plane(cloud);
  const GroundPlane o = oracle::exhaustive_plane(pts, 0.15);
  EXPECT_NEAR(g.a, o.a, 1e-3);
  EXPECT_NEAR(g.b, o.b, 1e-3);
  EXPECT_NEAR(g.c, o.c, 1e-3);
  EXPECT_NEAR(g.d, o.d, 1e-3);
  EXPECT_NEAR(g.c, 1.0, 1e-3);
  EXPECT_NEAR(g.d, 0.0, 1e-3);
}

TEST(GroundPlane, Tilted) {
  PointCloud cloud;
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) {
      cloud.points.push_back({float(i), float(j), float(0.05 * i), 0.0f});
    }
  }
  const GroundPlane g = fit_ground_plane(cloud);
  const double n = std::sqrt(1 + 0.05 * 0.05);
  EXPECT_NEAR(g.a, -0.05 / n, 1e-3);
  EXPECT_NEAR(g.b, 0, 1e-3);
  EXPECT_NEAR(g.c, 1 / n, 1e-3);
  EXPECT_NEAR(g.height_at(10, 3), 0.5, 1e-3);
}

TEST(GroundPlane, Deterministic) {
  const auto f = testing::make_frame(5, 0);
  const GroundPlane a = fit_ground_plane(f.cloud, {200, 0.15, 9});
  const GroundPlane b = fit_ground_plane(f.cloud, {200, 0.15, 9});
  EXPECT_EQ(a.d, b.d);
  EXPECT_NEAR(a.height_at(10, 0), testing::kGroundZ, 1e-3);
}

TEST(GroundPlane, Errors) {
  PointCloud two;
  two.points = {{0, 0, 0, 0}, {1, 0, 0, 0}};
  EXPECT_EQ(code_of([&] { fit_ground_plane(two); }), ErrorCode::kInsufficientPoints);
  PointCloud line;
  for (int i = 0; i < 10; ++i) line.points.push_back({float(i), float(2 * i), 0, 0});
  EXPECT_EQ(code_of([&] { fit_ground_plane(line); }), ErrorCode::kDegenerateGeometry);
}

TEST(Heights, ConstructedPinhole) {
  ProjectionMatrix p;
  p << 0, 1, 0, 0,  //
      0, 0, -100, 150,  //
      1, 0, 0, 0;
  const auto h = solve_corner_heights(corner_points({10, 0, 2, 2, 0}), p, 0.0);
  for (double z : h.candidates) EXPECT_NEAR(z, 1.5, 1e-12);
  EXPECT_NEAR(h.top, 1.5, 1e-12);
}

TEST(Heights, BehindCamera) {
  ProjectionMatrix p;
  p << 0, 1, 0, 0,  //
      0, 0, -100, 150,  //
      1, 0, 0, 0;
  EXPECT_EQ(code_of([&] { solve_corner_heights(corner_points({-10, 0, 2, 2, 0}), p, 0.0); }),
            ErrorCode::kBehindCamera);
}

TEST(Heights, NoSolution) {
  ProjectionMatrix p;
  p << 0, 1, 0, 0,  //
      0, 1, 0, 150,  //
      1, 0, 0, 0;
  EXPECT_EQ(code_of([&] { solve_corner_heights(corner_points({10, 0, 2, 2, 0}), p, 3.0); }),
            ErrorCode::kNoSolution);
}

// Upright pinhole looking along `yaw` from `eye`, pitched slightly.
ProjectionMatrix random_camera(std::mt19937_64& rng, Eigen::Vector3d& eye, double& yaw) {
  std::uniform_real_distribution<double> f(500, 1000), cx(500, 700), cy(150, 250);
  std::uniform_real_distribution<double> ang(-kPi, kPi), tilt(-0.05, 0.05), off(-1, 1), hgt(0, 0.5);
  Eigen::Matrix3d k;
  k << f(rng), 0, cx(rng), 0, 0, cy(rng), 0, 0, 1;
  k(1, 1) = k(0, 0);
  yaw = ang(rng);
  eye = {off(rng), off(rng), hgt(rng)};
  Eigen::Matrix3d axes;  // sensor axes -> camera (x right, y down, z forward)
  axes << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(tilt(rng), Eigen::Vector3d::UnitX()).toRotationMatrix() *
                            axes *
                            Eigen::AngleAxisd(-yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  Matrix34 rt;
  rt.leftCols<3>() = r;
  rt.col(3) = -r * eye;
  return k * rt;
}

TEST(Heights, ForwardProjectionOracle) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> dist(8, 40), side(-0.3, 0.3), hh(1.3, 1.9);
  int checked = 0;
  while (checked < 300) {
    Eigen::Vector3d eye;
    double yaw = 0;
    const ProjectionMatrix p = random_camera(rng, eye, yaw);
    BoxBEV b = testing::random_box(rng, 0.0);
    const double r = dist(rng);
    const double bearing = yaw + side(rng);
    b.x = eye.x() + r * std::cos(bearing);
    b.y = eye.y() + r * std::sin(bearing);
    const Box3D truth = make_box3d(b, -1.7, hh(rng));
    const auto ib = project_box(p, truth);
    if (!ib) continue;
    const auto h = solve_corner_heights(corner_points(b), p, ib->v_min);
    EXPECT_NEAR(h.top, truth.top(), 1e-9);
    const auto pts = corner_points(b);
    for (int k = 0; k < 4; ++k) {
      EXPECT_GE(h.candidates[k], truth.top() - 1e-9);
      EXPECT_NEAR(h.candidates[k],
                  oracle::bisect_height(p, pts[k].x, pts[k].y, ib->v_min, -10.0, 20.0), 1e-7);
    }
    const auto scaled = solve_corner_heights(pts, 7.3 * p, ib->v_min);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(scaled.candidates[k], h.candidates[k], 1e-12);
    ++checked;
  }
}

TEST(Assemble, Examples) {
  const Box3D b = assemble_box3d({10, 5, 4, 2, 0}, 1.5, 0.0);
  EXPECT_DOUBLE_EQ(b.z, 0.75);
  EXPECT_DOUBLE_EQ(b.h, 1.5);
  EXPECT_DOUBLE_EQ(b.x, 10);
  EXPECT_DOUBLE_EQ(b.l, 4);
  EXPECT_EQ(code_of([] { assemble_box3d({10, 5, 4, 2, 0}, 0.0, 0.0); }),
            ErrorCode::kNonPositiveHeight);
  const GroundPlane tilted{0, 0, 1, 1.7};
  EXPECT_NEAR(assemble_box3d({10, 5, 4, 2, 0}, 0.0, tilted).h, 1.7, 1e-12);
}

}  // namespace
}  // namespace cornerbox
