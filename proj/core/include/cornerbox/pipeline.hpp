// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// Dataset-level pipelines behind the command-line tool: converting full
// labels to weak corner annotations, and recovering full 3D boxes from weak
// annotations.
//
// Directory conventions (one file per frame, shared stem):
//   labels  <id>.txt   object records
//   clouds  <id>.bin   float32 x, y, z, reflectance
//   calib   <id>.txt   P0..P3, R0_rect, Tr_velo_to_cam

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cornerbox/error.hpp"
#include "cornerbox/kitti_io.hpp"
#include "cornerbox/recovery.hpp"
#include "cornerbox/weak_labels.hpp"

namespace cornerbox {

/// Sorted stems of the files in `dir` with extension `ext` (e.g. ".bin").
std::vector<std::string> list_frames(const std::filesystem::path& dir, const std::string& ext);

PointCloud load_cloud_file(const std::filesystem::path& path);
Calib load_calib_file(const std::filesystem::path& path, int camera = 2);

struct ConvertOptions {
  double visibility_radius = 0.3;
  int camera = 2;
};

struct ConvertResult {
  std::vector<WeakAnnotation> annotations;
  std::array<std::size_t, 5> corner_histogram{};  // objects by visible corners
  std::size_t frames = 0;

  std::size_t weightless() const { return corner_histogram[0]; }
};

/// Weak annotations for one frame. DontCare records are skipped; object ids
/// are the record positions in the label file.
std::vector<WeakAnnotation> convert_frame(const std::string& frame,
                                          const std::vector<KittiLabel>& labels,
                                          const PointCloud& cloud, const Calib& calib,
                                          const ConvertOptions& options = {});

ConvertResult convert_dataset(const std::filesystem::path& labels_dir,
                              const std::filesystem::path& clouds_dir,
                              const std::filesystem::path& calib_dir,
                              const ConvertOptions& options = {});

struct RecoverOptions {
  /// Choose the dimension two adjacent corners leave open so that the
  /// projected box reproduces the image box.
  bool extent_from_image = true;
  /// Otherwise estimate it from the cloud points behind the annotated edge.
  bool extent_from_cloud = true;
  double default_extent = kDefaultExtent;
  double min_extent = 0.2;
  double max_extent = 8.0;
  double extent_scan_step = 0.01;
  double extent_gap = 0.5;          // break in point support ending the object
  double ground_clearance = 0.15;   // points this close to the ground are ignored
  SizePrior size_prior;             // used for diagonal pairs
};

/// Where the open dimension of an adjacent corner pair came from.
enum class ExtentSource { kCorners, kImage, kCloud, kDefault };

std::string_view to_string(ExtentSource source);

struct ObjectRecovery {
  std::string frame;
  int object = 0;
  std::optional<ErrorCode> reason;  // empty on full success
  std::string detail;
  std::optional<TargetCase> target;
  std::optional<BoxBEV> bev;
  ProposalSource source = ProposalSource::kFitted;
  std::optional<Box3D> box;
  bool length_determined = false;
  bool width_determined = false;
  ExtentSource open_extent = ExtentSource::kCorners;
  std::optional<double> top_z;
  double ground_z = 0.0;
};

/// Missing-dimension estimate for an adjacent corner pair: the depth of
/// contiguous above-ground cloud support behind the annotated edge of `bev`.
std::optional<double> estimate_open_extent(const BoxBEV& bev, TargetCase kind,
                                           const std::vector<AnnotatedCorner>& corners,
                                           const PointCloud& cloud, double ground_z,
                                           const RecoverOptions& options);

struct ImageExtentFit {
  double extent = 0.0;    // minimiser of the image-box residual
  double residual = 0.0;  // squared pixels over u_min, u_max, v_max
  /// False when the residual is flat around the minimiser: the image box
  /// only bounds the extent to [lo, hi].
  bool unique = false;
  double lo = 0.0;
  double hi = 0.0;
};

/// Open dimension of an adjacent corner pair from the image box. `bev` is a
/// fit of the pair with any value in the open dimension; for each candidate
/// extent the box grows away from the annotated edge, its top is re-solved
/// from the image box's top row, and the remaining box edges are compared.
/// nullopt when no candidate projects in front of the camera.
std::optional<ImageExtentFit> fit_open_extent_to_image(const BoxBEV& bev, TargetCase kind,
                                                       const std::vector<AnnotatedCorner>& corners,
                                                       double ground_z, const ImageBox& image_box,
                                                       const ProjectionMatrix& projection,
                                                       const RecoverOptions& options = {});

/// Full recovery of one annotated object: BEV fit from the corners, ground
/// height from the corners' z_g, top height from the image box through
/// `calib`. An adjacent pair's open dimension comes from the image box when
/// it pins it down, else from the cloud, else the default, clamped to what
/// the image box allows. Failures are reported through `reason`, never thrown; a BEV box
/// is still returned whenever one could be fitted.
ObjectRecovery recover_object(const WeakAnnotation& ann, const PointCloud* cloud,
                              const Calib* calib, const RecoverOptions& options = {});

struct RecoverResult {
  std::vector<ObjectRecovery> objects;
  std::map<std::string, std::vector<KittiLabel>> labels;  // per frame, recovered only
};

RecoverResult recover_annotations(const std::vector<WeakAnnotation>& anns,
                                  const std::filesystem::path& calib_dir,
                                  const std::filesystem::path& clouds_dir,
                                  const RecoverOptions& options = {}, int camera = 2);

/// Writes <frame>.txt label files and report.txt into `out_dir`.
void write_recover_output(const RecoverResult& result, const std::filesystem::path& out_dir);

/// One line per object: frame, object id, status (ok or reason code), detail.
std::string format_recover_report(const RecoverResult& result);

}  // namespace cornerbox
