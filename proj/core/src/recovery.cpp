// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/recovery.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "cornerbox/error.hpp"

namespace cornerbox {

namespace {

constexpr double kMinSpan = 1e-6;
constexpr int kMaxIterations = 100;
constexpr double kConvergence = 1e-12;

struct AxisSolve {
  double offset = 0.0;
  double half_extent = 0.0;
};

// Least squares for q_i = offset + s_i * half over one local axis. When
// `fixed_half` is set only the offset is estimated.
AxisSolve solve_axis(const std::vector<double>& q, const std::vector<double>& s,
                     std::optional<double> fixed_half) {
  const double n = static_cast<double>(q.size());
  double sum_s = 0.0;
  double sum_q = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    sum_s += s[i];
    sum_q += q[i];
    sum_sq += s[i] * q[i];
  }
  if (fixed_half) {
    return {(sum_q - *fixed_half * sum_s) / n, *fixed_half};
  }
  // Normal equations [n S; S n] [offset; half] = [Q; SQ] (s_i^2 == 1).
  const double det = n * n - sum_s * sum_s;
  return {(n * sum_q - sum_s * sum_sq) / det, (n * sum_sq - sum_s * sum_q) / det};
}

struct LinearParams {
  Vec2 center;
  double half_l = 0.0;
  double half_w = 0.0;
};

LinearParams solve_linear(const std::vector<IndexedCorner>& corners, double theta,
                          std::optional<double> fixed_half_l,
                          std::optional<double> fixed_half_w) {
  std::vector<double> qu;
  std::vector<double> qv;
  std::vector<double> su;
  std::vector<double> sv;
  for (const auto& c : corners) {
    const Vec2 q = rotate(c.xy(), -theta);
    const Vec2 s = corner_sign(c.index);
    qu.push_back(q.x);
    qv.push_back(q.y);
    su.push_back(s.x);
    sv.push_back(s.y);
  }
  const AxisSolve u = solve_axis(qu, su, fixed_half_l);
  const AxisSolve v = solve_axis(qv, sv, fixed_half_w);
  return {rotate({u.offset, v.offset}, theta), u.half_extent, v.half_extent};
}

// Best rotation (with free translation) carrying the local template corners
// onto the observations.
double solve_rotation(const std::vector<IndexedCorner>& corners, double half_l,
                      double half_w, double fallback) {
  Vec2 mean_p;
  Vec2 mean_c;
  const double n = static_cast<double>(corners.size());
  for (const auto& c : corners) {
    const Vec2 s = corner_sign(c.index);
    mean_p = mean_p + Vec2{s.x * half_l, s.y * half_w} * (1.0 / n);
    mean_c = mean_c + c.xy() * (1.0 / n);
  }
  double sin_sum = 0.0;
  double cos_sum = 0.0;
  for (const auto& c : corners) {
    const Vec2 s = corner_sign(c.index);
    const Vec2 p = Vec2{s.x * half_l, s.y * half_w} - mean_p;
    const Vec2 q = c.xy() - mean_c;
    sin_sum += cross(p, q);
    cos_sum += dot(p, q);
  }
  if (sin_sum == 0.0 && cos_sum == 0.0) return fallback;
  return std::atan2(sin_sum, cos_sum);
}

// Heading estimate from whichever adjacent pairs are present. Returns
// nullopt when only a diagonal is available.
std::optional<double> edge_heading(const std::array<const IndexedCorner*, 4>& by_index) {
  Vec2 acc;
  bool any = false;
  auto add = [&](int from, int to, double offset) {
    if (by_index[from] == nullptr || by_index[to] == nullptr) return;
    const Vec2 d = by_index[from]->xy() - by_index[to]->xy();
    const double len = norm(d);
    if (len <= kMinSpan) return;
    acc = acc + rotate(d, offset);
    any = true;
  };
  // Long edges point along the heading from back to front.
  add(0, 3, 0.0);
  add(1, 2, 0.0);
  // Short edges point from right to left, a quarter turn off the heading.
  add(0, 1, -kPi / 2.0);
  add(3, 2, -kPi / 2.0);
  if (!any || norm(acc) <= 0.0) return std::nullopt;
  return bearing(acc);
}

// Golden-section minimisation of f on [lo, hi].
template <typename F>
double golden_minimize(F&& f, double lo, double hi, double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace

double rectangle_objective(const BoxBEV& box,
                           const std::vector<IndexedCorner>& corners) {
  const auto pts = corner_points(box);
  double sum = 0.0;
  for (const auto& c : corners) {
    const Vec2 r = c.xy() - pts[c.index];
    sum += dot(r, r);
  }
  return sum;
}

RectangleFit fit_rectangle(const std::vector<IndexedCorner>& corners,
                           const SizePrior& prior) {
  std::array<const IndexedCorner*, 4> by_index{};
  for (const auto& c : corners) {
    if (c.index < 0 || c.index > 3) {
      throw Error(ErrorCode::kInvalidCornerIndex,
                  "corner index " + std::to_string(c.index) + " not in 0..3");
    }
    if (by_index[c.index] != nullptr) {
      throw Error(ErrorCode::kInvalidCornerIndex,
                  "corner index " + std::to_string(c.index) + " repeated");
    }
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) {
      throw Error(ErrorCode::kNonFinite, "corner coordinates must be finite");
    }
    by_index[c.index] = &c;
  }
  if (corners.size() < 2) {
    throw Error(ErrorCode::kUnderdetermined, "need at least two corners");
  }
  double span = 0.0;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    for (std::size_t j = i + 1; j < corners.size(); ++j) {
      span = std::max(span, norm(corners[i].xy() - corners[j].xy()));
    }
  }
  if (span < kMinSpan) {
    throw Error(ErrorCode::kDegenerate, "corners span less than 1e-6 m");
  }

  bool mixed_u = false;
  bool mixed_v = false;
  for (const auto& c : corners) {
    const Vec2 s = corner_sign(c.index);
    const Vec2 s0 = corner_sign(corners.front().index);
    mixed_u = mixed_u || s.x != s0.x;
    mixed_v = mixed_v || s.y != s0.y;
  }

  const bool diagonal_only = corners.size() == 2 && mixed_u && mixed_v;
  std::optional<double> fixed_half_l;
  std::optional<double> fixed_half_w;
  RectangleFit fit;
  if (diagonal_only) {
    if (!prior.length || !prior.width) {
      throw Error(ErrorCode::kUnderdetermined,
                  "a diagonal corner pair needs both length and width");
    }
    fixed_half_l = *prior.length / 2.0;
    fixed_half_w = *prior.width / 2.0;
  } else {
    if (!mixed_u) {
      fixed_half_l = prior.length.value_or(kDefaultExtent) / 2.0;
      fit.length_determined = false;
    }
    if (!mixed_v) {
      fixed_half_w = prior.width.value_or(kDefaultExtent) / 2.0;
      fit.width_determined = false;
    }
  }
  if ((fixed_half_l && !(*fixed_half_l > 0.0)) ||
      (fixed_half_w && !(*fixed_half_w > 0.0))) {
    throw Error(ErrorCode::kInvalidArgument, "size prior must be positive");
  }

  double theta = 0.0;
  if (auto heading = edge_heading(by_index)) {
    theta = *heading;
  } else {
    // Diagonal pair with known size: undo the corner bearing in the box frame.
    const IndexedCorner& first = corners[0];
    const IndexedCorner& second = corners[1];
    const Vec2 s = corner_sign(first.index);
    const double local = std::atan2(s.y * *fixed_half_w, s.x * *fixed_half_l);
    theta = bearing(first.xy() - second.xy()) - local;
  }

  auto evaluate = [&](double t, LinearParams* out) {
    const LinearParams lp = solve_linear(corners, t, fixed_half_l, fixed_half_w);
    if (out != nullptr) *out = lp;
    const BoxBEV b{lp.center.x, lp.center.y, 2.0 * lp.half_l, 2.0 * lp.half_w, t};
    return rectangle_objective(b, corners);
  };

  LinearParams lp;
  double objective = evaluate(theta, &lp);
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const double next_theta = solve_rotation(corners, lp.half_l, lp.half_w, theta);
    LinearParams next_lp;
    const double next_objective = evaluate(next_theta, &next_lp);
    if (next_objective > objective) break;
    const double delta = objective - next_objective;
    theta = next_theta;
    lp = next_lp;
    objective = next_objective;
    if (delta < kConvergence) break;
  }

  // Alternation converges linearly on noisy input; finish on the concentrated
  // one-dimensional objective and keep whichever is lower.
  if (objective > kConvergence) {
    const double polished = golden_minimize(
        [&](double t) { return evaluate(t, nullptr); }, theta - 0.05, theta + 0.05,
        1e-12);
    LinearParams polished_lp;
    const double polished_objective = evaluate(polished, &polished_lp);
    if (polished_objective < objective) {
      theta = polished;
      lp = polished_lp;
      objective = polished_objective;
    }
  }

  if (!(lp.half_l > 0.0) || !(lp.half_w > 0.0)) {
    throw Error(ErrorCode::kInfeasibleGeometry,
                "fitted rectangle has a non-positive side");
  }
  fit.box = {lp.center.x, lp.center.y, 2.0 * lp.half_l, 2.0 * lp.half_w,
             canonicalize_yaw(theta)};
  fit.objective = objective;
  fit.iterations = it;
  return fit;
}

// ---------------------------------------------------------------------------
// Corner clustering

namespace {

struct Cluster {
  int index = 0;
  Vec2 centroid;
  double score = 0.0;
  std::vector<std::size_t> members;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

std::vector<Cluster> agglomerate(const std::vector<CornerObservation>& obs,
                                 double radius) {
  std::vector<std::size_t> parent(obs.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    for (std::size_t j = i + 1; j < obs.size(); ++j) {
      if (obs[i].index != obs[j].index) continue;
      if (std::hypot(obs[i].x - obs[j].x, obs[i].y - obs[j].y) <= radius) {
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    groups[find_root(parent, i)].push_back(i);
  }

  std::vector<Cluster> clusters;
  for (auto& [root, members] : groups) {
    // Accumulate in coordinate order so the centroid does not depend on the
    // order observations were supplied in.
    std::vector<std::size_t> ordered = members;
    std::sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(obs[a].x, obs[a].y, obs[a].score) <
             std::tie(obs[b].x, obs[b].y, obs[b].score);
    });
    Cluster c;
    c.index = obs[ordered.front()].index;
    double weight = 0.0;
    Vec2 weighted;
    Vec2 plain;
    for (std::size_t i : ordered) {
      weighted = weighted + Vec2{obs[i].x, obs[i].y} * obs[i].score;
      plain = plain + Vec2{obs[i].x, obs[i].y};
      weight += obs[i].score;
    }
    c.score = weight;
    c.centroid = weight > 0.0 ? weighted * (1.0 / weight)
                              : plain * (1.0 / static_cast<double>(ordered.size()));
    c.members = std::move(members);
    std::sort(c.members.begin(), c.members.end());
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return std::tie(a.index, a.centroid.x, a.centroid.y, a.score) <
           std::tie(b.index, b.centroid.x, b.centroid.y, b.score);
  });
  return clusters;
}

std::vector<IndexedCorner> group_corners(const std::vector<Cluster>& clusters,
                                         const std::vector<std::size_t>& group) {
  std::vector<IndexedCorner> out;
  for (std::size_t g : group) {
    out.push_back({clusters[g].centroid.x, clusters[g].centroid.y, clusters[g].index});
  }
  std::sort(out.begin(), out.end(), [](const IndexedCorner& a, const IndexedCorner& b) {
    return a.index < b.index;
  });
  return out;
}

bool consistent(const std::vector<Cluster>& clusters,
                const std::vector<std::size_t>& merged, const ClusterOptions& opt) {
  std::array<bool, 4> used{};
  for (std::size_t g : merged) {
    if (used[clusters[g].index]) return false;
    used[clusters[g].index] = true;
  }
  for (std::size_t i = 0; i < merged.size(); ++i) {
    for (std::size_t j = i + 1; j < merged.size(); ++j) {
      if (norm(clusters[merged[i]].centroid - clusters[merged[j]].centroid) >
          opt.match_radius) {
        return false;
      }
    }
  }
  if (merged.size() >= 3) {
    try {
      const auto fit = fit_rectangle(group_corners(clusters, merged));
      const double rms = std::sqrt(fit.objective / static_cast<double>(merged.size()));
      if (rms > opt.cluster_radius) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

Proposal fallback_region(Vec2 center, double extent) {
  Proposal p;
  p.bev = {center.x, center.y, extent, extent, 0.0};
  p.source = ProposalSource::kFallbackRegion;
  return p;
}

}  // namespace

std::vector<Proposal> cluster_corners(const std::vector<CornerObservation>& obs,
                                      const ClusterOptions& options) {
  if (!(options.cluster_radius > 0.0) || !(options.match_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cluster radii must be positive");
  }
  for (const auto& o : obs) {
    if (o.index < 0 || o.index > 3) {
      throw Error(ErrorCode::kInvalidCornerIndex, "observation index not in 0..3");
    }
    if (!(o.score >= 0.0 && o.score <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "observation score not in [0, 1]");
    }
  }

  const std::vector<Cluster> clusters = agglomerate(obs, options.cluster_radius);
  const std::size_t n = clusters.size();

  struct Edge {
    double distance;
    double score;
    int low_index;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t b = 0; b < n; ++b) {
      if (clusters[b].index == clusters[a].index) continue;
      const double d = norm(clusters[a].centroid - clusters[b].centroid);
      if (d <= options.match_radius) near.emplace_back(d, b);
    }
    std::sort(near.begin(), near.end(), [&](const auto& x, const auto& y) {
      return std::tie(x.first, clusters[y.second].score, clusters[x.second].index) <
             std::tie(y.first, clusters[x.second].score, clusters[y.second].index);
    });
    const std::size_t keep =
        std::min<std::size_t>(near.size(), static_cast<std::size_t>(options.nearest_candidates));
    for (std::size_t k = 0; k < keep; ++k) {
      const std::size_t b = near[k].second;
      edges.push_back({near[k].first, clusters[a].score + clusters[b].score,
                       std::min(clusters[a].index, clusters[b].index), std::min(a, b),
                       std::max(a, b)});
    }
  }
  // Greedy best-first: shortest distance, then higher summed score, then
  // lower corner index. Cluster order is canonical, so a/b finish the tie.
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.distance, y.score, x.low_index, x.a, x.b) <
           std::tie(y.distance, x.score, y.low_index, y.a, y.b);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& x, const Edge& y) { return x.a == y.a && x.b == y.b; }),
              edges.end());

  std::vector<std::size_t> group_of(n);
  std::iota(group_of.begin(), group_of.end(), 0);
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[i] = {i};

  for (const Edge& e : edges) {
    const std::size_t ga = group_of[e.a];
    const std::size_t gb = group_of[e.b];
    if (ga == gb) continue;
    std::vector<std::size_t> merged = groups[ga];
    merged.insert(merged.end(), groups[gb].begin(), groups[gb].end());
    if (!consistent(clusters, merged, options)) continue;
    for (std::size_t m : groups[gb]) group_of[m] = ga;
    groups[ga] = std::move(merged);
    groups[gb].clear();
  }

  std::vector<Proposal> proposals;
  for (const auto& group : groups) {
    if (group.empty()) continue;
    std::vector<std::size_t> members;
    Vec2 mean;
    for (std::size_t g : group) {
      members.insert(members.end(), clusters[g].members.begin(), clusters[g].members.end());
      mean = mean + clusters[g].centroid * (1.0 / static_cast<double>(group.size()));
    }
    std::sort(members.begin(), members.end());

    const bool bare_diagonal =
        group.size() == 2 && (clusters[group[0]].index + 2) % 4 == clusters[group[1]].index;
    Proposal p;
    if (group.size() >= 2 && !bare_diagonal) {
      try {
        const auto fit = fit_rectangle(group_corners(clusters, group),
                                       SizePrior{options.fallback_extent, options.fallback_extent});
        p.bev = fit.box;
        p.source = ProposalSource::kFitted;
      } catch (const Error&) {
        p = fallback_region(mean, options.fallback_extent);
      }
    } else {
      p = fallback_region(mean, options.fallback_extent);
    }
    p.member_corner_ids = std::move(members);
    proposals.push_back(std::move(p));
  }
  std::sort(proposals.begin(), proposals.end(), [](const Proposal& a, const Proposal& b) {
    return std::tie(a.bev.x, a.bev.y, a.bev.theta, a.source) <
           std::tie(b.bev.x, b.bev.y, b.bev.theta, b.source);
  });
  return proposals;
}

// ---------------------------------------------------------------------------
// Ground plane

double GroundPlane::height_at(double x, double y) const {
  return -(a * x + b * y + d) / c;
}

double GroundPlane::distance(double x, double y, double z) const {
  return a * x + b * y + c * z + d;
}

namespace {

GroundPlane oriented_plane(Eigen::Vector3d normal, const Eigen::Vector3d& through) {
  normal.normalize();
  bool flip = normal.z() < 0.0;
  if (normal.z() == 0.0) {
    flip = normal.x() < 0.0 || (normal.x() == 0.0 && normal.y() < 0.0);
  }
  if (flip) normal = -normal;
  return {normal.x(), normal.y(), normal.z(), -normal.dot(through)};
}

}  // namespace

GroundPlane fit_plane_least_squares(const std::vector<Eigen::Vector3d>& points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::kInsufficientPoints, "plane fit needs three points");
  }
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d q = p - mean;
    cov += q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d ev = solver.eigenvalues();  // ascending
  if (ev(1) <= 1e-12 * std::max(ev(2), 1e-300)) {
    throw Error(ErrorCode::kDegenerateGeometry, "points are collinear");
  }
  return oriented_plane(solver.eigenvectors().col(0), mean);
}

GroundPlane fit_ground_plane(const PointCloud& cloud, const PlaneFitOptions& options) {
  const std::size_t n = cloud.size();
  if (n < 3) {
    throw Error(ErrorCode::kInsufficientPoints,
                "plane fit needs three points, got " + std::to_string(n));
  }
  if (options.iterations < 1 || !(options.inlier_tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad plane-fit options");
  }
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  for (const auto& p : cloud.points) {
    pts.emplace_back(p.x, p.y, p.z);
  }
  // Rejects collinear input up front; also yields a fallback hypothesis.
  const GroundPlane all = fit_plane_least_squares(pts);

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t best_count = 0;
  Eigen::Vector3d best_normal = Eigen::Vector3d::UnitZ();
  double best_d = 0.0;
  bool found = false;
  for (int it = 0; it < options.iterations; ++it) {
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    const std::size_t k = pick(rng);
    if (i == j || j == k || i == k) continue;
    Eigen::Vector3d normal = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
    const double len = normal.norm();
    if (len < 1e-9) continue;
    normal /= len;
    const double d = -normal.dot(pts[i]);
    std::size_t count = 0;
    for (const auto& p : pts) {
      if (std::abs(normal.dot(p) + d) <= options.inlier_tolerance) ++count;
    }
    if (!found || count > best_count) {
      found = true;
      best_count = count;
      best_normal = normal;
      best_d = d;
    }
  }
  if (!found) return all;

  std::vector<Eigen::Vector3d> inliers;
  inliers.reserve(best_count);
  for (const auto& p : pts) {
    if (std::abs(best_normal.dot(p) + best_d) <= options.inlier_tolerance) {
      inliers.push_back(p);
    }
  }
  try {
    return fit_plane_least_squares(inliers);
  } catch (const Error&) {
    return oriented_plane(best_normal, -best_d * best_normal);
  }
}

// ---------------------------------------------------------------------------
// Height recovery

CornerHeights solve_corner_heights(const std::array<Vec2, 4>& bev_corners,
                                   const ProjectionMatrix& P, double v_top) {
  CornerHeights out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double x = bev_corners[i].x;
    const double y = bev_corners[i].y;
    // row_v . X = v_top * row_3 . X, linear in z.
    const double coef = P(1, 2) - v_top * P(2, 2);
    const double rhs = v_top * (P(2, 0) * x + P(2, 1) * y + P(2, 3)) -
                       (P(1, 0) * x + P(1, 1) * y + P(1, 3));
    const double scale = std::abs(P(1, 2)) + std::abs(v_top * P(2, 2));
    if (coef == 0.0 || std::abs(coef) <= 1e-12 * scale) {
      throw Error(ErrorCode::kNoSolution,
                  "vertical line through corner " + std::to_string(i) +
                      " projects to a single image row");
    }
    const double z = rhs / coef;
    const double depth = P(2, 0) * x + P(2, 1) * y + P(2, 2) * z + P(2, 3);
    if (!(depth > 0.0)) {
      throw Error(ErrorCode::kBehindCamera,
                  "corner " + std::to_string(i) + " lies behind the camera");
    }
    out.candidates[i] = z;
  }
  out.top = *std::min_element(out.candidates.begin(), out.candidates.end());
  return out;
}

Box3D assemble_box3d(const BoxBEV& bev, double top_z, double ground_z) {
  const double h = top_z - ground_z;
  if (!(h > 0.0)) {
    throw Error(ErrorCode::kNonPositiveHeight,
                "top " + std::to_string(top_z) + " is not above ground " +
                    std::to_string(ground_z));
  }
  return make_box3d(bev, ground_z, h);
}

Box3D assemble_box3d(const BoxBEV& bev, double top_z, const GroundPlane& ground) {
  return assemble_box3d(bev, top_z, ground.height_at(bev.x, bev.y));
}

}  // namespace cornerbox
