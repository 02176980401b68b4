// Copyright 2026 The cornerbox Authors
// SPDX-License-Identifier: Apache-2.0

#include "cornerbox/annotation_io.hpp"

#include <nlohmann/json.hpp>

#include "cornerbox/error.hpp"

namespace cornerbox {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidAnnotation, what);
}

double number_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(where + key + ": missing");
  if (!it->is_number()) bad(where + key + ": expected a number");
  return it->get<double>();
}

}  // namespace

std::string to_json_line(const WeakAnnotation& ann) {
  json j;
  j["frame"] = ann.frame;
  j["object"] = ann.object;
  json corners = json::array();
  for (const auto& c : ann.corners) {
    corners.push_back({{"n", c.index}, {"x", c.x}, {"y", c.y}, {"zg", c.z_g}});
  }
  j["corners"] = std::move(corners);
  if (ann.image_box) {
    const auto& b = *ann.image_box;
    j["image_box"] = {b.u_min, b.v_min, b.u_max, b.v_max};
  } else {
    j["image_box"] = nullptr;
  }
  return j.dump();
}

WeakAnnotation parse_annotation(std::string_view text, bool require_ids) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("record must be a JSON object");

  WeakAnnotation ann;
  if (const auto it = j.find("frame"); it != j.end()) {
    if (!it->is_string()) bad("frame: expected a string");
    ann.frame = it->get<std::string>();
  } else if (require_ids) {
    bad("frame: missing");
  }
  if (const auto it = j.find("object"); it != j.end()) {
    if (!it->is_number_integer()) bad("object: expected an integer");
    ann.object = it->get<int>();
  } else if (require_ids) {
    bad("object: missing");
  }

  const auto corners = j.find("corners");
  if (corners == j.end()) bad("corners: missing");
  if (!corners->is_array()) bad("corners: expected an array");
  for (std::size_t i = 0; i < corners->size(); ++i) {
    const json& c = (*corners)[i];
    const std::string where = "corners[" + std::to_string(i) + "].";
    if (!c.is_object()) bad(where.substr(0, where.size() - 1) + ": expected an object");
    const auto n = c.find("n");
    if (n == c.end()) bad(where + "n: missing");
    if (!n->is_number_integer()) bad(where + "n: expected an integer");
    AnnotatedCorner corner;
    corner.index = n->get<int>();
    corner.x = number_field(c, "x", where);
    corner.y = number_field(c, "y", where);
    corner.z_g = c.contains("zg") ? number_field(c, "zg", where) : 0.0;
    ann.corners.push_back(corner);
  }

  if (const auto it = j.find("image_box"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 4) bad("image_box: expected [umin,vmin,umax,vmax]");
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!(*it)[k].is_number()) bad("image_box: expected numbers");
      v[k] = (*it)[k].get<double>();
    }
    ann.image_box = ImageBox{v[0], v[1], v[2], v[3]};
  }
  validate(ann);
  return ann;
}

std::vector<WeakAnnotation> parse_annotation_lines(std::string_view text) {
  std::vector<WeakAnnotation> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(parse_annotation(line));
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidAnnotation,
                    "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    start = end + 1;
  }
  return out;
}

std::string serialize_annotation_lines(const std::vector<WeakAnnotation>& anns) {
  std::string out;
  for (const auto& a : anns) {
    out += to_json_line(a);
    out += '\n';
  }
  return out;
}

}  // namespace cornerbox
