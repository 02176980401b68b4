// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "cornerbox/error.hpp"

namespace cornerbox {

namespace {

double decoded_iou(const BoxBEV& truth, const EncodedBox& code) {
  try {
    return bev_iou(truth, decode(code));
  } catch (const Error&) {
    return 0.0;
  }
}

// Linear-interpolated percentile of sorted data, q in [0, 1].
double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SensitivityCurve sweep(const BoxBEV& box, Scheme scheme, const PerturbationSpec& spec,
                       int corner) {
  if (!box.valid()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs a valid box");
  }
  const std::size_t slot = slot_position(scheme, spec.parameter);
  const EncodedBox base = encode(box, scheme, corner);
  const double base_value = get_slot(base, slot);

  SensitivityCurve curve;
  curve.scheme = scheme;
  curve.parameter = spec.parameter;

  if (!spec.noise) {
    for (double offset : spec.values) {
      EncodedBox code = base;
      set_slot(code, slot, base_value + offset);
      const double iou = decoded_iou(box, code);
      curve.rows.push_back({offset, iou, iou, iou});
    }
    return curve;
  }

  const NoiseModel& noise = *spec.noise;
  if (noise.trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "noise trials must be >= 1");
  }
  for (std::size_t row = 0; row < spec.values.size(); ++row) {
    const double scale = spec.values[row];
    if (!(scale >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "noise scale must be >= 0");
    }
    std::vector<double> ious(static_cast<std::size_t>(noise.trials));
    for (int t = 0; t < noise.trials; ++t) {
      auto rng = trial_rng(noise.seed, row, static_cast<std::uint64_t>(t));
      double delta = 0.0;
      if (scale > 0.0) {
        if (noise.distribution == NoiseDistribution::kGaussian) {
          delta = std::normal_distribution<double>(0.0, scale)(rng);
        } else {
          delta = std::uniform_real_distribution<double>(-scale, scale)(rng);
        }
      }
      EncodedBox code = base;
      set_slot(code, slot, base_value + delta);
      ious[static_cast<std::size_t>(t)] = decoded_iou(box, code);
    }
    const double mean =
        std::accumulate(ious.begin(), ious.end(), 0.0) / static_cast<double>(ious.size());
    std::sort(ious.begin(), ious.end());
    curve.rows.push_back({scale, mean, percentile(ious, 0.05), percentile(ious, 0.95)});
  }
  return curve;
}

std::vector<double> make_range(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw Error(ErrorCode::kInvalidArgument, "range needs finite bounds and a positive step");
  }
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 0.5));
  for (long long i = 0; i <= count; ++i) {
    out.push_back(start + static_cast<double>(i) * step);
  }
  return out;
}

std::optional<double> first_crossing(const SensitivityCurve& curve, double level) {
  const auto& rows = curve.rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].mean_iou <= level) {
      if (i == 0) return rows[0].offset;
      const auto& a = rows[i - 1];
      const auto& b = rows[i];
      const double frac = (a.mean_iou - level) / (a.mean_iou - b.mean_iou);
      return a.offset + (b.offset - a.offset) * frac;
    }
  }
  return std::nullopt;
}

double min_mean_iou(const SensitivityCurve& curve) {
  double m = 1.0;
  for (const auto& r : curve.rows) m = std::min(m, r.mean_iou);
  return m;
}

void write_csv(std::ostream& out, const SensitivityCurve& curve) {
  const auto old_precision = out.precision(10);
  out << "scheme,parameter,offset,mean_iou,p5,p95\n";
  for (const auto& r : curve.rows) {
    out << to_string(curve.scheme) << ',' << curve.parameter << ',' << r.offset << ','
        << r.mean_iou << ',' << r.p5 << ',' << r.p95 << '\n';
  }
  out.precision(old_precision);
}

std::vector<SchemeScore> compare_schemes(const BoxBEV& box, const ComparisonOptions& options) {
  if (options.trials < 100) {
    throw Error(ErrorCode::kInvalidArgument, "compare_schemes needs at least 100 trials");
  }
  if (!(options.noise_scale >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise scale must be >= 0");
  }
  const double angle_scale = options.angle_scale.value_or(0.5 * options.noise_scale);

  std::vector<SchemeScore> table;
  for (Scheme scheme : kAllSchemes) {
    const EncodedBox base = encode(box, scheme, options.corner);
    const auto names = slot_names(scheme);
    SchemeScore score{scheme, 0.0, 0};
    double sum = 0.0;
    for (int t = 0; t < options.trials; ++t) {
      auto rng = trial_rng(options.seed, static_cast<std::uint64_t>(scheme),
                           static_cast<std::uint64_t>(t));
      std::normal_distribution<double> unit(0.0, 1.0);
      EncodedBox code = base;
      for (std::size_t s = 0; s < names.size(); ++s) {
        const double sigma = is_angle_slot(names[s]) ? angle_scale : options.noise_scale;
        set_slot(code, s, get_slot(code, s) + sigma * unit(rng));
      }
      try {
        sum += bev_iou(box, decode(code));
      } catch (const Error&) {
        ++score.failures;
      }
    }
    score.mean_iou = sum / static_cast<double>(options.trials);
    table.push_back(score);
  }
  return table;
}

}  // namespace cornerbox
