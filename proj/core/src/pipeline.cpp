// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cornerbox/annotation_io.hpp"

namespace cornerbox {

namespace fs = std::filesystem;

std::vector<std::string> list_frames(const fs::path& dir, const std::string& ext) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      out.push_back(entry.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PointCloud load_cloud_file(const fs::path& path) {
  try {
    return load_point_cloud(read_binary_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Calib load_calib_file(const fs::path& path, int camera) {
  try {
    return compose_projection(parse_calib_file(read_text_file(path)), camera);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<WeakAnnotation> convert_frame(const std::string& frame,
                                          const std::vector<KittiLabel>& labels,
                                          const PointCloud& cloud, const Calib& calib,
                                          const ConvertOptions& options) {
  std::vector<Box3D> boxes;
  std::vector<std::optional<ImageBox>> image_boxes;
  std::vector<int> ids;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].type == "DontCare") continue;
    boxes.push_back(label_to_box3d(labels[i], calib));
    image_boxes.push_back(labels[i].bbox.valid() ? std::optional(labels[i].bbox) : std::nullopt);
    ids.push_back(static_cast<int>(i));
  }
  auto anns = labels_to_weak(frame, boxes, cloud, image_boxes, options.visibility_radius);
  for (std::size_t k = 0; k < anns.size(); ++k) anns[k].object = ids[k];
  return anns;
}

ConvertResult convert_dataset(const fs::path& labels_dir, const fs::path& clouds_dir,
                              const fs::path& calib_dir, const ConvertOptions& options) {
  ConvertResult result;
  for (const auto& frame : list_frames(labels_dir, ".txt")) {
    const auto labels = [&] {
      const fs::path path = labels_dir / (frame + ".txt");
      try {
        return parse_label_file(read_text_file(path));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kIo) throw;
        throw Error(e.code(), path.string() + ": " + e.what());
      }
    }();
    const PointCloud cloud = load_cloud_file(clouds_dir / (frame + ".bin"));
    const Calib calib = load_calib_file(calib_dir / (frame + ".txt"), options.camera);
    for (auto& ann : convert_frame(frame, labels, cloud, calib, options)) {
      ++result.corner_histogram[ann.corners.size()];
      result.annotations.push_back(std::move(ann));
    }
    ++result.frames;
  }
  return result;
}

namespace {

// Unit vector in the BEV plane pointing from the annotated edge of an
// adjacent pair into the box.
Vec2 inward_direction(const BoxBEV& bev, TargetCase kind,
                      const std::vector<AnnotatedCorner>& corners) {
  const int first = std::min(corners[0].index, corners[1].index);
  Vec2 local;
  if (kind == TargetCase::kSide) {
    local = first == 0 ? Vec2{0.0, -1.0} : Vec2{0.0, 1.0};
  } else {
    local = first == 0 ? Vec2{-1.0, 0.0} : Vec2{1.0, 0.0};
  }
  return rotate(local, bev.theta);
}

bool is_adjacent_pair(TargetCase kind, const std::vector<AnnotatedCorner>& corners) {
  return corners.size() == 2 && (kind == TargetCase::kSide || kind == TargetCase::kFrontRear);
}

// `bev` with its open dimension set to `extent`, the annotated edge fixed.
BoxBEV with_open_extent(const BoxBEV& bev, TargetCase kind, Vec2 inward, double extent) {
  BoxBEV out = bev;
  double& open = kind == TargetCase::kSide ? out.w : out.l;
  const Vec2 shift = inward * ((extent - open) / 2.0);
  open = extent;
  out.x += shift.x;
  out.y += shift.y;
  return out;
}

}  // namespace

std::string_view to_string(ExtentSource source) {
  switch (source) {
    case ExtentSource::kCorners: return "corners";
    case ExtentSource::kImage: return "image";
    case ExtentSource::kCloud: return "cloud";
    case ExtentSource::kDefault: return "default";
  }
  return "unknown";
}

std::optional<ImageExtentFit> fit_open_extent_to_image(const BoxBEV& bev, TargetCase kind,
                                                       const std::vector<AnnotatedCorner>& corners,
                                                       double ground_z, const ImageBox& image_box,
                                                       const ProjectionMatrix& projection,
                                                       const RecoverOptions& options) {
  if (!is_adjacent_pair(kind, corners) || !image_box.valid()) return std::nullopt;
  const Vec2 inward = inward_direction(bev, kind, corners);
  const bool annotated[4] = {
      corners[0].index == 0 || corners[1].index == 0, corners[0].index == 1 || corners[1].index == 1,
      corners[0].index == 2 || corners[1].index == 2, corners[0].index == 3 || corners[1].index == 3};
  struct Eval {
    double residual = std::numeric_limits<double>::infinity();
    bool depends = false;  // a far corner sets the top or a compared edge
  };
  auto evaluate = [&](double extent) {
    Eval e;
    const BoxBEV b = with_open_extent(bev, kind, inward, extent);
    const auto pts = corner_points(b);
    CornerHeights h;
    try {
      h = solve_corner_heights(pts, projection, image_box.v_min);
    } catch (const Error&) {
      return e;
    }
    if (!(h.top > ground_z)) return e;
    double u_min = 0.0, u_max = 0.0, v_max = 0.0;
    int arg_u_min = -1, arg_u_max = -1, arg_v_max = -1;
    for (int k = 0; k < 4; ++k) {
      for (double z : {ground_z, h.top}) {
        const auto px = project(projection, {pts[k].x, pts[k].y, z});
        if (!px) return e;
        if (arg_u_min < 0 || px->x < u_min) u_min = px->x, arg_u_min = k;
        if (arg_u_max < 0 || px->x > u_max) u_max = px->x, arg_u_max = k;
        if (arg_v_max < 0 || px->y > v_max) v_max = px->y, arg_v_max = k;
      }
    }
    const int arg_top = static_cast<int>(
        std::min_element(h.candidates.begin(), h.candidates.end()) - h.candidates.begin());
    const double du0 = u_min - image_box.u_min;
    const double du1 = u_max - image_box.u_max;
    const double dv1 = v_max - image_box.v_max;
    e.residual = du0 * du0 + du1 * du1 + dv1 * dv1;
    e.depends = !annotated[arg_u_min] || !annotated[arg_u_max] || !annotated[arg_v_max] ||
                !annotated[arg_top];
    return e;
  };
  auto residual = [&](double extent) { return evaluate(extent).residual; };

  const double step = options.extent_scan_step;
  std::vector<std::pair<double, Eval>> scan;
  for (double d = options.min_extent; d <= options.max_extent + 1e-12; d += step) {
    scan.emplace_back(d, evaluate(d));
  }
  const auto best = std::min_element(scan.begin(), scan.end(), [](const auto& a, const auto& b) {
    return a.second.residual < b.second.residual;
  });
  if (best == scan.end() || !std::isfinite(best->second.residual)) return std::nullopt;

  ImageExtentFit fit;
  fit.extent = best->first;
  fit.residual = best->second.residual;
  fit.lo = fit.hi = best->first;
  fit.unique = best->second.depends;
  if (!fit.unique) {
    // The image box edges come from the annotated corners alone around the
    // best candidate; it only bounds the extent to the stretch where that
    // stays true.
    auto lo = best;
    while (lo != scan.begin() && !std::prev(lo)->second.depends &&
           std::isfinite(std::prev(lo)->second.residual)) {
      --lo;
    }
    auto hi = best;
    while (std::next(hi) != scan.end() && !std::next(hi)->second.depends &&
           std::isfinite(std::next(hi)->second.residual)) {
      ++hi;
    }
    fit.lo = lo->first;
    fit.hi = hi->first;
    return fit;
  }

  // Golden-section polish inside the bracketing scan cells.
  double a = std::max(options.min_extent, best->first - step);
  double b = std::min(options.max_extent, best->first + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = residual(c);
  double fd = residual(d);
  while (b - a > 1e-12) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = residual(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = residual(d);
    }
  }
  const double polished = (a + b) / 2.0;
  const double fp = residual(polished);
  if (fp <= fit.residual) {
    fit.extent = polished;
    fit.residual = fp;
  }
  return fit;
}

std::optional<double> estimate_open_extent(const BoxBEV& bev, TargetCase kind,
                                           const std::vector<AnnotatedCorner>& corners,
                                           const PointCloud& cloud, double ground_z,
                                           const RecoverOptions& options) {
  if (!is_adjacent_pair(kind, corners)) return std::nullopt;
  const double half_span = kind == TargetCase::kSide ? bev.l / 2.0 : bev.w / 2.0;
  const Vec2 inward = inward_direction(bev, kind, corners);
  const Vec2 along{-inward.y, inward.x};
  const Vec2 mid = (Vec2{corners[0].x, corners[0].y} + Vec2{corners[1].x, corners[1].y}) * 0.5;

  std::vector<double> depth;
  for (const auto& p : cloud.points) {
    if (p.z <= ground_z + options.ground_clearance) continue;
    const Vec2 rel = Vec2{p.x, p.y} - mid;
    const double d = dot(rel, inward);
    if (d <= 0.0 || d > options.max_extent) continue;
    if (std::abs(dot(rel, along)) > half_span) continue;
    depth.push_back(d);
  }
  std::sort(depth.begin(), depth.end());
  double reach = 0.0;
  for (double d : depth) {
    if (d - reach > options.extent_gap) break;
    reach = d;
  }
  if (reach <= options.extent_gap / 10.0) return std::nullopt;
  return reach;
}

ObjectRecovery recover_object(const WeakAnnotation& ann, const PointCloud* cloud,
                              const Calib* calib, const RecoverOptions& options) {
  ObjectRecovery out;
  out.frame = ann.frame;
  out.object = ann.object;
  auto fail = [&](const Error& e) {
    out.reason = e.code();
    out.detail = e.what();
    return out;
  };

  try {
    validate(ann);
  } catch (const Error& e) {
    return fail(e);
  }
  if (!ann.corners.empty()) {
    double zg = 0.0;
    for (const auto& c : ann.corners) zg += c.z_g;
    out.ground_z = zg / static_cast<double>(ann.corners.size());
  }

  WeakToFullTarget target;
  try {
    target = weak_to_full(ann, options.size_prior);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kLocalizeOnly || e.code() == ErrorCode::kUnderdetermined) {
      // Nothing to fit; offer the default search region around the corners.
      Vec2 mean;
      for (const auto& c : ann.corners) {
        mean = mean + Vec2{c.x, c.y} * (1.0 / static_cast<double>(ann.corners.size()));
      }
      out.bev = BoxBEV{mean.x, mean.y, options.default_extent, options.default_extent, 0.0};
      out.source = ProposalSource::kFallbackRegion;
    }
    return fail(e);
  }
  out.target = target.kind;

  std::vector<IndexedCorner> corners;
  for (const auto& c : target.corners) corners.push_back({c.x, c.y, c.index});
  SizePrior prior = options.size_prior;
  try {
    if (target.kind == TargetCase::kSide || target.kind == TargetCase::kFrontRear) {
      // Provisional box with the open side at the default, to orient the search.
      const RectangleFit provisional =
          fit_rectangle(corners, {options.default_extent, options.default_extent});
      std::optional<ImageExtentFit> image;
      if (options.extent_from_image && ann.image_box && calib != nullptr) {
        image = fit_open_extent_to_image(provisional.box, target.kind, target.corners,
                                         out.ground_z, *ann.image_box, calib->projection, options);
      }
      std::optional<double> extent;
      if (image && image->unique) {
        extent = image->extent;
        out.open_extent = ExtentSource::kImage;
      } else if (options.extent_from_cloud && cloud != nullptr) {
        extent = estimate_open_extent(provisional.box, target.kind, target.corners, *cloud,
                                      out.ground_z, options);
        if (extent) out.open_extent = ExtentSource::kCloud;
      }
      if (!extent) out.open_extent = ExtentSource::kDefault;
      double open = extent.value_or(options.default_extent);
      if (image && !image->unique) open = std::clamp(open, image->lo, image->hi);
      if (target.kind == TargetCase::kSide) {
        prior.width = open;
      } else {
        prior.length = open;
      }
    }
    const RectangleFit fit = fit_rectangle(corners, prior);
    out.bev = fit.box;
    out.length_determined = fit.length_determined || target.kind == TargetCase::kDiagonal;
    out.width_determined = fit.width_determined || target.kind == TargetCase::kDiagonal;
  } catch (const Error& e) {
    return fail(e);
  }

  if (!ann.image_box) {
    return fail(Error(ErrorCode::kMissingImageBox, "no image box to recover height from"));
  }
  if (calib == nullptr) {
    return fail(Error(ErrorCode::kMissingComponent, "no calibration for height recovery"));
  }
  try {
    const CornerHeights heights =
        solve_corner_heights(corner_points(*out.bev), calib->projection, ann.image_box->v_min);
    out.top_z = heights.top;
    out.box = assemble_box3d(*out.bev, heights.top, out.ground_z);
  } catch (const Error& e) {
    return fail(e);
  }
  return out;
}

RecoverResult recover_annotations(const std::vector<WeakAnnotation>& anns,
                                  const fs::path& calib_dir, const fs::path& clouds_dir,
                                  const RecoverOptions& options, int camera) {
  RecoverResult result;
  std::map<std::string, Calib> calibs;
  std::map<std::string, PointCloud> clouds;
  for (const auto& ann : anns) {
    if (!calibs.contains(ann.frame)) {
      calibs.emplace(ann.frame, load_calib_file(calib_dir / (ann.frame + ".txt"), camera));
    }
    if (options.extent_from_cloud && !clouds.contains(ann.frame)) {
      clouds.emplace(ann.frame, load_cloud_file(clouds_dir / (ann.frame + ".bin")));
    }
    const Calib& calib = calibs.at(ann.frame);
    const auto cloud_it = clouds.find(ann.frame);
    const PointCloud* cloud = cloud_it == clouds.end() ? nullptr : &cloud_it->second;
    ObjectRecovery rec = recover_object(ann, cloud, &calib, options);
    auto& frame_labels = result.labels[ann.frame];
    if (rec.box) frame_labels.push_back(box3d_to_label(*rec.box, calib));
    result.objects.push_back(std::move(rec));
  }
  return result;
}

std::string format_recover_report(const RecoverResult& result) {
  std::ostringstream out;
  for (const auto& o : result.objects) {
    out << o.frame << ' ' << o.object << ' ';
    if (o.reason) {
      out << to_string(*o.reason) << ' ' << o.detail;
    } else {
      out << "ok";
    }
    out << '\n';
  }
  return out.str();
}

void write_recover_output(const RecoverResult& result, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  for (const auto& [frame, labels] : result.labels) {
    write_file_atomic(out_dir / (frame + ".txt"), serialize_labels(labels));
  }
  write_file_atomic(out_dir / "report.txt", format_recover_report(result));
}

}  // namespace cornerbox
