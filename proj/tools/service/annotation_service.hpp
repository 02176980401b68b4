// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

// HTTP service behind the BEV annotator.
//
// Data directory layout (KITTI-like, one stem per frame):
//   velodyne/<id>.bin        point cloud (required; defines the frame list)
//   calib/<id>.txt           calibration (needed for height recovery)
//   annotations/<id>.jsonl   corner annotations, rewritten by PUT
//
// Endpoints, all JSON except the annotation bodies (JSON lines):
//   GET  /frames                      {"frames":["000000",...]}
//   GET  /frames/{id}/bev?decimate=R  {"frame","total","x":[...],"y":[...]}
//   GET  /frames/{id}/annotations     annotation records, one per line
//   PUT  /frames/{id}/annotations     replace the records; 422 on bad input
//   POST /frames/{id}/recover         partial record -> recovered box
//
// A recover body is one record; "frame" and "object" may be omitted, and a
// corner without "zg" gets the ground height fitted to the frame's cloud.
// The response always has status 200 once the body parses:
//   {"reason":null|"LocalizeOnly"|...,"detail":"...","target":"Side"|null,
//    "source":"fitted"|"fallback_region","bev":{x,y,l,w,theta}|null,
//    "box":{x,y,z,l,w,h,theta}|null,"length_determined":bool,
//    "width_determined":bool,"open_extent":"corners"|"image"|"cloud"|"default",
//    "ground_z":z,"top_z":z|null}
// Errors are {"error":"<code>","detail":"..."} with 404 (unknown frame) or
// 422 (malformed body).

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cornerbox/kitti_io.hpp"
#include "cornerbox/pipeline.hpp"
#include "cornerbox/recovery.hpp"

namespace httplib {
class Server;
}

namespace cornerbox::service {

struct ServiceOptions {
  std::filesystem::path data_dir;
  std::size_t default_decimate = 50000;
  int camera = 2;
  RecoverOptions recover;
  PlaneFitOptions ground;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Request handlers, callable directly or mounted on an httplib server.
class AnnotationService {
 public:
  explicit AnnotationService(ServiceOptions options);

  Response frames() const;
  Response bev(const std::string& frame, std::optional<std::size_t> decimate);
  Response get_annotations(const std::string& frame) const;
  Response put_annotations(const std::string& frame, const std::string& body);
  Response recover(const std::string& frame, const std::string& body);

  void mount(httplib::Server& server);

  std::filesystem::path annotation_path(const std::string& frame) const;

 private:
  struct FrameData {
    PointCloud cloud;
    std::optional<Calib> calib;
    std::optional<GroundPlane> ground;
  };

  bool has_frame(const std::string& frame) const;
  std::shared_ptr<const FrameData> load(const std::string& frame);
  std::mutex& write_lock(const std::string& frame);

  ServiceOptions options_;
  std::mutex cache_mutex_;
  std::map<std::string, std::shared_ptr<const FrameData>> cache_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> write_locks_;
};

/// Stride sample keeping at most `limit` indices out of `total`, in order.
std::vector<std::size_t> stride_sample(std::size_t total, std::size_t limit);

/// Blocks serving on host:port until the server is stopped.
int serve(ServiceOptions options, const std::string& host, int port);

}  // namespace cornerbox::service
