// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/weak_labels.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "cornerbox/codecs.hpp"
#include "cornerbox/error.hpp"

namespace cornerbox {

void validate(const WeakAnnotation& ann) {
  if (ann.corners.size() > 4) {
    throw Error(ErrorCode::kInvalidAnnotation,
                "corners: at most 4 entries, got " + std::to_string(ann.corners.size()));
  }
  std::array<bool, 4> seen{};
  for (const auto& c : ann.corners) {
    if (c.index < 0 || c.index > 3) {
      throw Error(ErrorCode::kInvalidAnnotation,
                  "corners.n: index " + std::to_string(c.index) + " not in 0..3");
    }
    if (seen[c.index]) {
      throw Error(ErrorCode::kInvalidAnnotation,
                  "corners.n: index " + std::to_string(c.index) + " repeated");
    }
    seen[c.index] = true;
    if (!std::isfinite(c.x) || !std::isfinite(c.y) || !std::isfinite(c.z_g)) {
      throw Error(ErrorCode::kInvalidAnnotation, "corners: coordinates must be finite");
    }
  }
  if (ann.image_box && !ann.image_box->valid()) {
    throw Error(ErrorCode::kInvalidAnnotation,
                "image_box: requires umin < umax and vmin < vmax");
  }
}

std::string_view to_string(TargetCase c) {
  switch (c) {
    case TargetCase::kSide: return "Side";
    case TargetCase::kFrontRear: return "FrontRear";
    case TargetCase::kDiagonal: return "Diagonal";
    case TargetCase::kThreePlus: return "ThreePlus";
  }
  return "Unknown";
}

WeakToFullTarget weak_to_full(const WeakAnnotation& ann, const SizePrior& diagonal_size) {
  validate(ann);
  if (ann.corners.empty()) {
    throw Error(ErrorCode::kNoCorners, "annotation has no corners");
  }
  if (ann.corners.size() == 1) {
    throw Error(ErrorCode::kLocalizeOnly, "a single corner only localises that corner");
  }

  WeakToFullTarget target;
  target.corners = ann.corners;
  std::sort(target.corners.begin(), target.corners.end(),
            [](const AnnotatedCorner& a, const AnnotatedCorner& b) { return a.index < b.index; });
  const auto& cs = target.corners;

  if (cs.size() >= 3) {
    std::vector<IndexedCorner> pts;
    for (const auto& c : cs) pts.push_back({c.x, c.y, c.index});
    const RectangleFit fit = fit_rectangle(pts);
    target.kind = TargetCase::kThreePlus;
    target.l = fit.box.l;
    target.w = fit.box.w;
    target.theta = fit.box.theta;
    target.bev = fit.box;
    return target;
  }

  const AnnotatedCorner& a = cs[0];
  const AnnotatedCorner& b = cs[1];
  const Vec2 pa{a.x, a.y};
  const Vec2 pb{b.x, b.y};
  if (norm(pa - pb) < 1e-6) {
    throw Error(ErrorCode::kDegenerate, "annotated corners coincide");
  }
  const int pair = a.index * 4 + b.index;
  switch (pair) {
    case 0 * 4 + 3:  // FL, BL: left edge, back to front
    case 1 * 4 + 2:  // FR, BR: right edge
      target.kind = TargetCase::kSide;
      target.l = norm(pa - pb);
      target.theta = canonicalize_yaw(bearing(pa - pb));
      return target;
    case 0 * 4 + 1:  // FL, FR: front edge, right to left
      target.kind = TargetCase::kFrontRear;
      target.w = norm(pa - pb);
      target.theta = canonicalize_yaw(bearing(pa - pb) - kPi / 2.0);
      return target;
    case 2 * 4 + 3:  // BR, BL: rear edge, right to left
      target.kind = TargetCase::kFrontRear;
      target.w = norm(pb - pa);
      target.theta = canonicalize_yaw(bearing(pb - pa) - kPi / 2.0);
      return target;
    default:
      break;
  }

  // Diagonal pair: only usable with an externally supplied size.
  if (!diagonal_size.length || !diagonal_size.width) {
    throw Error(ErrorCode::kUnderdetermined,
                "diagonal corners " + std::to_string(a.index) + "," + std::to_string(b.index) +
                    " need a supplied length and width");
  }
  const EncodedBox code{DSCornerCode{a.x, a.y, b.x, b.y, a.index, *diagonal_size.length,
                                     *diagonal_size.width}};
  const BoxBEV box = decode(code);
  target.kind = TargetCase::kDiagonal;
  target.l = box.l;
  target.w = box.w;
  target.theta = box.theta;
  target.bev = box;
  return target;
}

CornerSet visibility_filter(const BoxBEV& box, const PointCloud& cloud, double radius) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "visibility radius must be positive");
  }
  CornerSet cs = corners_from_box(box);
  const double r2 = radius * radius;
  for (auto& c : cs.corners) {
    c.visible = std::any_of(cloud.points.begin(), cloud.points.end(), [&](const LidarPoint& p) {
      const double dx = p.x - c.x;
      const double dy = p.y - c.y;
      return dx * dx + dy * dy <= r2;
    });
  }
  return cs;
}

std::size_t MaskedPoints::count(PointLabel label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

namespace {

struct CellKey {
  std::int64_t i;
  std::int64_t j;
  friend bool operator==(CellKey, CellKey) = default;
};

struct CellHash {
  std::size_t operator()(CellKey k) const noexcept {
    return std::hash<std::int64_t>()(k.i * 73856093 ^ k.j * 19349663);
  }
};

}  // namespace

MaskedPoints foreground_mask(const std::vector<WeakAnnotation>& anns, const PointCloud& cloud,
                             double radius) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "foreground radius must be positive");
  }
  // Bucket corners on a grid of cell size `radius`; a point only needs the
  // 3x3 block of cells around its own.
  std::unordered_map<CellKey, std::vector<Vec2>, CellHash> grid;
  auto cell_of = [radius](double x, double y) {
    return CellKey{static_cast<std::int64_t>(std::floor(x / radius)),
                   static_cast<std::int64_t>(std::floor(y / radius))};
  };
  for (const auto& ann : anns) {
    for (const auto& c : ann.corners) {
      grid[cell_of(c.x, c.y)].push_back({c.x, c.y});
    }
  }

  const double r2 = radius * radius;
  MaskedPoints mask;
  mask.labels.assign(cloud.size(), PointLabel::kBackground);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const LidarPoint& p = cloud.points[i];
    const CellKey home = cell_of(p.x, p.y);
    bool hit = false;
    for (std::int64_t di = -1; di <= 1 && !hit; ++di) {
      for (std::int64_t dj = -1; dj <= 1 && !hit; ++dj) {
        const auto it = grid.find({home.i + di, home.j + dj});
        if (it == grid.end()) continue;
        for (const Vec2& c : it->second) {
          const double dx = p.x - c.x;
          const double dy = p.y - c.y;
          if (dx * dx + dy * dy <= r2) {
            hit = true;
            break;
          }
        }
      }
    }
    if (hit) mask.labels[i] = PointLabel::kForeground;
  }
  return mask;
}

std::vector<BoxBEV> erased_regions(const BoxBEV& box, const ErasureStrategy& strategy) {
  if (!(strategy.fraction > 0.0 && strategy.fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "erasure fraction must lie in (0, 1)");
  }
  const double f = strategy.fraction;
  if (strategy.shape == ErasureShape::kCenterBox) {
    return {BoxBEV{box.x, box.y, f * box.l, f * box.w, box.theta}};
  }
  std::vector<BoxBEV> blocks;
  const double bl = f * box.l / 2.0;
  const double bw = f * box.w / 2.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2 s = corner_sign(i);
    const Vec2 local{s.x * (box.l - bl) / 2.0, s.y * (box.w - bw) / 2.0};
    const Vec2 c = box.center() + rotate(local, box.theta);
    blocks.push_back({c.x, c.y, bl, bw, box.theta});
  }
  return blocks;
}

MaskedPoints erasure_mask(const BoxBEV& box, const PointCloud& cloud,
                          const ErasureStrategy& strategy) {
  if (!(strategy.fraction > 0.0 && strategy.fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "erasure fraction must lie in (0, 1)");
  }
  const double hl = box.l / 2.0;
  const double hw = box.w / 2.0;
  const double f = strategy.fraction;
  MaskedPoints mask;
  mask.labels.assign(cloud.size(), PointLabel::kBackground);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec2 q = to_box_frame(box, {cloud.points[i].x, cloud.points[i].y});
    const double u = std::abs(q.x);
    const double v = std::abs(q.y);
    if (u > hl || v > hw) continue;
    bool erased = false;
    if (strategy.shape == ErasureShape::kCenterBox) {
      erased = u <= f * hl && v <= f * hw;
    } else {
      // Blocks of (f*l/2) x (f*w/2) in each corner; the central cross stays.
      erased = u >= hl - f * hl && v >= hw - f * hw;
    }
    mask.labels[i] = erased ? PointLabel::kErased : PointLabel::kForeground;
  }
  return mask;
}

double annotation_weight(int annotated, int total) {
  if (total <= 0 || annotated < 0 || annotated > total) {
    throw Error(ErrorCode::kInvalidArgument, "annotated corner count out of range");
  }
  if (annotated == 0) return 0.0;
  return static_cast<double>(total) / static_cast<double>(annotated);
}

std::vector<WeakAnnotation> labels_to_weak(const std::string& frame,
                                           const std::vector<Box3D>& labels,
                                           const PointCloud& cloud,
                                           const std::vector<std::optional<ImageBox>>& image_boxes,
                                           double visibility_radius) {
  if (!image_boxes.empty() && image_boxes.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "image boxes must align with labels");
  }
  std::vector<WeakAnnotation> out;
  out.reserve(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const Box3D& box = labels[k];
    const CornerSet cs = visibility_filter(box.bev(), cloud, visibility_radius);
    WeakAnnotation ann;
    ann.frame = frame;
    ann.object = static_cast<int>(k);
    for (const auto& c : cs.corners) {
      if (c.visible) ann.corners.push_back({c.index, c.x, c.y, box.bottom()});
    }
    if (!image_boxes.empty()) ann.image_box = image_boxes[k];
    out.push_back(std::move(ann));
  }
  return out;
}

}  // namespace cornerbox
