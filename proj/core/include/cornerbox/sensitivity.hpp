// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// How parameter errors under each encoding translate into BEV IoU loss.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cornerbox/codecs.hpp"
#include "cornerbox/geometry.hpp"

namespace cornerbox {

enum class NoiseDistribution { kUniform, kGaussian };

struct NoiseModel {
  NoiseDistribution distribution = NoiseDistribution::kGaussian;
  int trials = 1000;
  std::uint64_t seed = 42;
};

/// Perturbation of one named slot. Without `noise`, each entry of `values`
/// is a fixed offset added to the slot. With `noise`, each entry is a noise
/// scale (standard deviation for gaussian, half-width for uniform) and every
/// row aggregates `noise->trials` random draws.
struct PerturbationSpec {
  std::string parameter;
  std::vector<double> values;
  std::optional<NoiseModel> noise;
};

struct SensitivityRow {
  double offset = 0.0;  // offset or noise scale
  double mean_iou = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
};

struct SensitivityCurve {
  Scheme scheme = Scheme::kCenter;
  std::string parameter;
  std::vector<SensitivityRow> rows;
};

/// Encodes `box`, perturbs the named slot per `spec`, decodes, and scores
/// IoU against `box`. Decode failures score 0. Throws UnknownParameter when
/// the scheme has no such slot.
SensitivityCurve sweep(const BoxBEV& box, Scheme scheme, const PerturbationSpec& spec,
                       int corner = 0);

/// Evenly spaced values from `start` to `stop` inclusive (within half a step).
std::vector<double> make_range(double start, double stop, double step);

/// Smallest offset at which the mean IoU falls to `level` or below, linearly
/// interpolated between grid rows. Assumes rows sorted by offset.
std::optional<double> first_crossing(const SensitivityCurve& curve, double level);

/// Lowest mean IoU on the curve.
double min_mean_iou(const SensitivityCurve& curve);

/// Writes `scheme,parameter,offset,mean_iou,p5,p95` rows with a header.
void write_csv(std::ostream& out, const SensitivityCurve& curve);

struct SchemeScore {
  Scheme scheme = Scheme::kCenter;
  double mean_iou = 0.0;
  int failures = 0;  // decodes that threw and scored 0
};

struct ComparisonOptions {
  double noise_scale = 0.1;  // metres, applied to every metric slot
  /// Standard deviation on angle slots, radians. Unset means
  /// 0.5 * noise_scale taken numerically.
  std::optional<double> angle_scale;
  int trials = 10000;
  std::uint64_t seed = 42;
  int corner = 0;
};

/// I.i.d. gaussian noise on every continuous slot of every scheme; mean IoU
/// per scheme in kAllSchemes order. Each trial draws from its own generator
/// seeded by (seed, scheme, trial), so results do not depend on evaluation
/// order. Throws InvalidArgument when trials < 100.
std::vector<SchemeScore> compare_schemes(const BoxBEV& box, const ComparisonOptions& options);

/// Reference car footprint used by the CLI defaults.
inline constexpr BoxBEV kReferenceCar{0.0, 0.0, 3.9, 1.6, 0.0};

}  // namespace cornerbox
