// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cornerbox/recovery.hpp"

namespace {

using namespace cornerbox;

void BM_FitRectangle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<std::vector<IndexedCorner>> sets;
  for (int i = 0; i < 256; ++i) {
    const auto pts = corner_points({10.0 + i * 0.1, 2.0, 4.2, 1.8, 0.01 * i});
    std::vector<IndexedCorner> s;
    for (int k = 0; k < n; ++k) s.push_back({pts[k].x + noise(rng), pts[k].y + noise(rng), k});
    sets.push_back(std::move(s));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_rectangle(sets[i & 255]));
    ++i;
  }
}
BENCHMARK(BM_FitRectangle)->Arg(2)->Arg(3)->Arg(4);

void BM_ClusterCorners(benchmark::State& state) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<CornerObservation> obs;
  for (int o = 0; o < state.range(0); ++o) {
    const auto pts = corner_points({8.0 * (o % 8), 8.0 * (o / 8), 4.0, 1.8, 0.3 * o});
    for (int k = 0; k < 4; ++k) {
      for (int rep = 0; rep < 3; ++rep) {
        obs.push_back({pts[k].x + noise(rng), pts[k].y + noise(rng), k, 0.8});
      }
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(cluster_corners(obs));
}
BENCHMARK(BM_ClusterCorners)->Arg(8)->Arg(32);

void BM_GroundPlane(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<float> pos(-40.0f, 40.0f);
  std::normal_distribution<float> jitter(0.0f, 0.02f);
  std::uniform_real_distribution<float> clutter(-1.5f, 1.0f);
  PointCloud cloud;
  for (int i = 0; i < state.range(0); ++i) {
    const float z = i % 4 == 0 ? clutter(rng) : -1.73f + jitter(rng);
    cloud.points.push_back({pos(rng), pos(rng), z, 0.0f});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_ground_plane(cloud));
}
BENCHMARK(BM_GroundPlane)->Arg(20000)->Arg(120000)->Unit(benchmark::kMillisecond);

void BM_CornerHeights(benchmark::State& state) {
  ProjectionMatrix p;
  p << 700, -720, 0, 0, 180, 0, -720, 0, 1, 0, 0, 0;
  const auto pts = corner_points({15.0, 1.0, 4.0, 1.8, 0.4});
  for (auto _ : state) benchmark::DoNotOptimize(solve_corner_heights(pts, p, 150.0));
}
BENCHMARK(BM_CornerHeights);

}  // namespace
