// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "annotation_service.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>
#include <system_error>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cornerbox/annotation_io.hpp"
#include "cornerbox/error.hpp"

namespace cornerbox::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Response json_response(int status, const json& body) {
  return {status, "application/json", body.dump()};
}

Response error_response(int status, std::string_view code, const std::string& detail) {
  return json_response(status, json{{"error", code}, {"detail", detail}});
}

Response unknown_frame(const std::string& frame) {
  return error_response(404, "UnknownFrame", "no frame '" + frame + "'");
}

// Frame ids become file stems; anything that could leave the data
// directory is rejected up front.
bool safe_id(const std::string& frame) {
  return !frame.empty() && frame.size() <= 128 &&
         std::all_of(frame.begin(), frame.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  c == '_' || c == '-';
         });
}

json bev_json(const BoxBEV& b) {
  return {{"x", b.x}, {"y", b.y}, {"l", b.l}, {"w", b.w}, {"theta", b.theta}};
}

json box_json(const Box3D& b) {
  return {{"x", b.x}, {"y", b.y}, {"z", b.z}, {"l", b.l},
          {"w", b.w}, {"h", b.h}, {"theta", b.theta}};
}

}  // namespace

std::vector<std::size_t> stride_sample(std::size_t total, std::size_t limit) {
  std::vector<std::size_t> out;
  if (total == 0 || limit == 0) return out;
  if (total <= limit) {
    out.resize(total);
    for (std::size_t i = 0; i < total; ++i) out[i] = i;
    return out;
  }
  const std::size_t stride = (total + limit - 1) / limit;
  for (std::size_t i = 0; i < total; i += stride) out.push_back(i);
  return out;
}

AnnotationService::AnnotationService(ServiceOptions options) : options_(std::move(options)) {}

fs::path AnnotationService::annotation_path(const std::string& frame) const {
  return options_.data_dir / "annotations" / (frame + ".jsonl");
}

bool AnnotationService::has_frame(const std::string& frame) const {
  std::error_code ec;
  return safe_id(frame) &&
         fs::is_regular_file(options_.data_dir / "velodyne" / (frame + ".bin"), ec);
}

std::shared_ptr<const AnnotationService::FrameData> AnnotationService::load(
    const std::string& frame) {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(frame); it != cache_.end()) return it->second;
  }
  auto data = std::make_shared<FrameData>();
  data->cloud = load_cloud_file(options_.data_dir / "velodyne" / (frame + ".bin"));
  const fs::path calib_path = options_.data_dir / "calib" / (frame + ".txt");
  std::error_code ec;
  if (fs::is_regular_file(calib_path, ec)) {
    data->calib = load_calib_file(calib_path, options_.camera);
  }
  try {
    data->ground = fit_ground_plane(data->cloud, options_.ground);
  } catch (const Error&) {
    data->ground.reset();
  }
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(frame, std::move(data)).first->second;
}

std::mutex& AnnotationService::write_lock(const std::string& frame) {
  std::lock_guard lock(locks_mutex_);
  auto& slot = write_locks_[frame];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

Response AnnotationService::frames() const {
  std::vector<std::string> ids;
  std::error_code ec;
  if (fs::is_directory(options_.data_dir / "velodyne", ec)) {
    for (auto& id : list_frames(options_.data_dir / "velodyne", ".bin")) {
      if (safe_id(id)) ids.push_back(std::move(id));
    }
  }
  return json_response(200, json{{"frames", ids}});
}

Response AnnotationService::bev(const std::string& frame, std::optional<std::size_t> decimate) {
  if (!has_frame(frame)) return unknown_frame(frame);
  const auto data = load(frame);
  const auto keep = stride_sample(data->cloud.size(), decimate.value_or(options_.default_decimate));
  std::vector<float> xs;
  std::vector<float> ys;
  xs.reserve(keep.size());
  ys.reserve(keep.size());
  for (std::size_t i : keep) {
    xs.push_back(data->cloud.points[i].x);
    ys.push_back(data->cloud.points[i].y);
  }
  return json_response(200, json{{"frame", frame}, {"total", data->cloud.size()},
                                 {"x", xs}, {"y", ys}});
}

Response AnnotationService::get_annotations(const std::string& frame) const {
  if (!has_frame(frame)) return unknown_frame(frame);
  std::error_code ec;
  const fs::path path = annotation_path(frame);
  std::string text;
  if (fs::is_regular_file(path, ec)) text = read_text_file(path);
  return {200, "application/x-ndjson", std::move(text)};
}

Response AnnotationService::put_annotations(const std::string& frame, const std::string& body) {
  if (!has_frame(frame)) return unknown_frame(frame);
  std::vector<WeakAnnotation> anns;
  try {
    anns = parse_annotation_lines(body);
  } catch (const Error& e) {
    return error_response(422, to_string(e.code()), e.what());
  }
  for (std::size_t i = 0; i < anns.size(); ++i) {
    if (anns[i].frame != frame) {
      return error_response(422, "InvalidAnnotation",
                            "record " + std::to_string(i + 1) + ": frame: expected '" + frame +
                                "', got '" + anns[i].frame + "'");
    }
  }
  // The body is stored verbatim so a later GET returns the same bytes.
  std::lock_guard lock(write_lock(frame));
  fs::create_directories(options_.data_dir / "annotations");
  write_file_atomic(annotation_path(frame), body);
  return json_response(200, json{{"frame", frame}, {"records", anns.size()}});
}

Response AnnotationService::recover(const std::string& frame, const std::string& body) {
  if (!has_frame(frame)) return unknown_frame(frame);
  WeakAnnotation ann;
  std::vector<bool> has_zg;
  try {
    ann = parse_annotation(body, false);
    const json doc = json::parse(body);
    for (const auto& c : doc.at("corners")) has_zg.push_back(c.contains("zg"));
  } catch (const Error& e) {
    return error_response(422, to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return error_response(422, "InvalidAnnotation", e.what());
  }
  if (!ann.frame.empty() && ann.frame != frame) {
    return error_response(422, "InvalidAnnotation",
                          "frame: expected '" + frame + "', got '" + ann.frame + "'");
  }
  ann.frame = frame;

  std::shared_ptr<const FrameData> data;
  try {
    data = load(frame);
  } catch (const Error& e) {
    return error_response(500, to_string(e.code()), e.what());
  }
  if (data->ground) {
    for (std::size_t i = 0; i < ann.corners.size(); ++i) {
      auto& c = ann.corners[i];
      if (!has_zg[i]) c.z_g = data->ground->height_at(c.x, c.y);
    }
  }

  const ObjectRecovery rec = recover_object(ann, &data->cloud,
                                            data->calib ? &*data->calib : nullptr,
                                            options_.recover);
  json out;
  out["frame"] = frame;
  out["object"] = rec.object;
  out["reason"] = rec.reason ? json(to_string(*rec.reason)) : json(nullptr);
  out["detail"] = rec.detail;
  out["target"] = rec.target ? json(to_string(*rec.target)) : json(nullptr);
  out["source"] = rec.source == ProposalSource::kFitted ? "fitted" : "fallback_region";
  out["bev"] = rec.bev ? bev_json(*rec.bev) : json(nullptr);
  out["box"] = rec.box ? box_json(*rec.box) : json(nullptr);
  out["length_determined"] = rec.length_determined;
  out["width_determined"] = rec.width_determined;
  out["open_extent"] = to_string(rec.open_extent);
  out["ground_z"] = rec.ground_z;
  out["top_z"] = rec.top_z ? json(*rec.top_z) : json(nullptr);
  return json_response(200, out);
}

void AnnotationService::mount(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  auto guarded = [reply](auto handler) {
    return [reply, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        reply(res, handler(req));
      } catch (const Error& e) {
        reply(res, error_response(500, to_string(e.code()), e.what()));
      } catch (const std::exception& e) {
        reply(res, error_response(500, "Internal", e.what()));
      }
    };
  };

  server.Get("/frames", guarded([this](const httplib::Request&) { return frames(); }));
  server.Get(R"(/frames/([^/]+)/bev)", guarded([this](const httplib::Request& req) {
               std::optional<std::size_t> decimate;
               if (req.has_param("decimate")) {
                 const std::string v = req.get_param_value("decimate");
                 std::size_t n = 0;
                 const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
                 if (ec != std::errc() || ptr != v.data() + v.size()) {
                   return error_response(422, "InvalidArgument",
                                         "decimate: expected a non-negative integer");
                 }
                 decimate = n;
               }
               return bev(req.matches[1], decimate);
             }));
  server.Get(R"(/frames/([^/]+)/annotations)", guarded([this](const httplib::Request& req) {
               return get_annotations(req.matches[1]);
             }));
  server.Put(R"(/frames/([^/]+)/annotations)", guarded([this](const httplib::Request& req) {
               return put_annotations(req.matches[1], req.body);
             }));
  server.Post(R"(/frames/([^/]+)/recover)", guarded([this](const httplib::Request& req) {
                return recover(req.matches[1], req.body);
              }));
}

int serve(ServiceOptions options, const std::string& host, int port) {
  AnnotationService service(std::move(options));
  httplib::Server server;
  service.mount(server);
  std::cerr << "serving on http://" << host << ':' << port << '\n';
  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace cornerbox::service
