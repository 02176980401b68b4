// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <gtest/gtest.h>

#include "cornerbox/error.hpp"
#include "cornerbox/sensitivity.hpp"
#include "oracles.hpp"

namespace cornerbox {
namespace {

SensitivityCurve offsets(Scheme s, const std::string& p, double a, double b, double step) {
  return sweep(kReferenceCar, s, {p, make_range(a, b, step), std::nullopt});
}

TEST(Sweep, ZeroOffsetIsExactlyOne) {
  for (Scheme s : kAllSchemes) {
    for (auto name : slot_names(s)) {
      const auto c = sweep(kReferenceCar, s, {std::string(name), {0.0}, std::nullopt});
      EXPECT_NEAR(c.rows.at(0).mean_iou, 1.0, 1e-12) << to_string(s) << " " << name;
    }
  }
}

TEST(Sweep, UnknownParameter) {
  try {
    offsets(Scheme::kDCorner, "l", 0, 1, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownParameter);
  }
}

TEST(Sweep, CenterYawMatchesRasterAtSamples) {
  const auto c = offsets(Scheme::kCenter, "theta", 0.0, 1.5, 0.25);
  for (const auto& r : c.rows) {
    const BoxBEV rotated{0, 0, 3.9, 1.6, r.offset};
    EXPECT_NEAR(r.mean_iou, oracle::raster_iou(kReferenceCar, rotated), 1e-3);
  }
}

TEST(Sweep, MonotoneForCenterSlots) {
  for (const char* p : {"x_c", "y_c"}) {
    const auto c = offsets(Scheme::kCenter, p, 0.0, 5.0, 0.01);
    for (std::size_t i = 1; i < c.rows.size(); ++i) {
      EXPECT_LE(c.rows[i].mean_iou, c.rows[i - 1].mean_iou + 1e-12) << p << " row " << i;
    }
  }
  const auto t = offsets(Scheme::kCenter, "theta", 0.0, kPi / 2, 0.001);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LE(t.rows[i].mean_iou, t.rows[i - 1].mean_iou + 1e-12) << "row " << i;
  }
}

TEST(Sweep, YawReferenceCrossings) {
  const auto center = offsets(Scheme::kCenter, "theta", 0.0, kPi / 2, 0.001);
  const auto at33 = first_crossing(center, 0.33);
  ASSERT_TRUE(at33.has_value());
  EXPECT_GT(*at33, 0.0);
  const auto dcorner = offsets(Scheme::kDCorner, "theta", 0.0, kPi / 2, 0.001);
  const auto at25 = first_crossing(dcorner, 0.25);
  ASSERT_TRUE(at25.has_value());
  EXPECT_LE(min_mean_iou(dcorner), 0.25);
  RecordProperty("center_033_offset", std::to_string(*at33));
  RecordProperty("dcorner_025_offset", std::to_string(*at25));
}

TEST(Sweep, NoiseRowsAreDeterministic) {
  PerturbationSpec spec{"x_o1", {0.0, 0.05, 0.1}, NoiseModel{NoiseDistribution::kGaussian, 300, 7}};
  const auto a = sweep(kReferenceCar, Scheme::kFCorner, spec);
  const auto b = sweep(kReferenceCar, Scheme::kFCorner, spec);
  ASSERT_EQ(a.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.rows[i].mean_iou, b.rows[i].mean_iou);
    EXPECT_LE(a.rows[i].p5, a.rows[i].mean_iou);
    EXPECT_GE(a.rows[i].p95, a.rows[i].p5);
  }
  EXPECT_NEAR(a.rows[0].mean_iou, 1.0, 1e-12);
  spec.noise->distribution = NoiseDistribution::kUniform;
  EXPECT_LT(sweep(kReferenceCar, Scheme::kFCorner, spec).rows[2].mean_iou, 1.0);
}

TEST(Sweep, CsvLayout) {
  const auto c = offsets(Scheme::kCorner, "x_o", 0.0, 0.2, 0.1);
  std::ostringstream out;
  write_csv(out, c);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "scheme,parameter,offset,mean_iou,p5,p95");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("corner,x_o,", 0), 0u) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Range, Inclusive) {
  const auto r = make_range(0.0, 1.0, 0.1);
  ASSERT_EQ(r.size(), 11u);
  EXPECT_NEAR(r.back(), 1.0, 1e-12);
  EXPECT_THROW(make_range(0, 1, 0), Error);
}

TEST(Compare, ZeroNoiseIsPerfect) {
  ComparisonOptions opts;
  opts.noise_scale = 0.0;
  opts.angle_scale = 0.0;
  opts.trials = 100;
  for (const auto& s : compare_schemes(kReferenceCar, opts)) {
    EXPECT_NEAR(s.mean_iou, 1.0, 1e-12) << to_string(s.scheme);
    EXPECT_EQ(s.failures, 0);
  }
}

TEST(Compare, DeterministicAndOrdered) {
  ComparisonOptions opts;
  opts.noise_scale = 0.1;
  opts.angle_scale = 0.05;
  opts.trials = 2000;
  const auto a = compare_schemes(kReferenceCar, opts);
  const auto b = compare_schemes(kReferenceCar, opts);
  ASSERT_EQ(a.size(), kAllSchemes.size());
  double f = 0, d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean_iou, b[i].mean_iou);
    if (a[i].scheme == Scheme::kFCorner) f = a[i].mean_iou;
    if (a[i].scheme == Scheme::kDCorner) d = a[i].mean_iou;
  }
  EXPECT_GE(f, d);
}

TEST(Compare, NeedsEnoughTrials) {
  ComparisonOptions opts;
  opts.trials = 99;
  EXPECT_THROW(compare_schemes(kReferenceCar, opts), Error);
}

}  // namespace
}  // namespace cornerbox
