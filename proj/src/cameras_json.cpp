// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/cameras_json.hpp"

#include "splatir/errors.hpp"
#include "splatir/image_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>

namespace splatir {
namespace {

using nlohmann::json;

const Mat4& flip_yz() {
  static const Mat4 m = Eigen::Vector4d(1.0, -1.0, -1.0, 1.0).asDiagonal();
  return m;
}

}  // namespace

Mat4 gl_camera_to_world_to_internal(const Mat4& c2w) {
  const Mat4 c2w_internal = c2w * flip_yz();
  const Mat3 r = c2w_internal.topLeftCorner<3, 3>();
  Mat4 w2c = Mat4::Identity();
  w2c.topLeftCorner<3, 3>() = r.transpose();
  w2c.topRightCorner<3, 1>() = -r.transpose() * c2w_internal.topRightCorner<3, 1>();
  return w2c;
}

Mat4 internal_to_gl_camera_to_world(const Mat4& w2c) {
  const Mat3 r = w2c.topLeftCorner<3, 3>();
  Mat4 c2w = Mat4::Identity();
  c2w.topLeftCorner<3, 3>() = r.transpose();
  c2w.topRightCorner<3, 1>() = -r.transpose() * w2c.topRightCorner<3, 1>();
  return c2w * flip_yz();
}

std::filesystem::path frame_image_path(const std::filesystem::path& json_path,
                                       const std::string& file_path) {
  std::filesystem::path p = json_path.parent_path() / file_path;
  if (!p.has_extension()) p += ".png";
  return p;
}

std::vector<CameraFrame> load_cameras(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array()) {
    throw ParseError(path.string() + ": expected an object with a 'frames' array");
  }
  auto number = [&](const json& obj, const char* key, std::size_t frame) -> std::optional<double> {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_number()) {
      throw ParseError(path.string() + ": frame " + std::to_string(frame) + " key '" + key +
                       "' is not a number");
    }
    const double v = obj[key].get<double>();
    if (!std::isfinite(v)) {
      throw ParseError(path.string() + ": frame " + std::to_string(frame) + " key '" + key +
                       "' is not finite");
    }
    return v;
  };

  std::vector<CameraFrame> frames;
  const json& list = doc["frames"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& f = list[i];
    const std::string where = path.string() + ": frame " + std::to_string(i);
    if (!f.is_object()) throw ParseError(where + " is not an object");
    CameraFrame frame;
    frame.file_path = f.value("file_path", std::string());

    if (!f.contains("transform_matrix") || !f["transform_matrix"].is_array() ||
        f["transform_matrix"].size() != 4) {
      throw ParseError(where + ": transform_matrix must be a 4x4 array");
    }
    Mat4 c2w;
    for (int r = 0; r < 4; ++r) {
      const json& row = f["transform_matrix"][r];
      if (!row.is_array() || row.size() != 4) {
        throw ParseError(where + ": transform_matrix must be a 4x4 array");
      }
      for (int c = 0; c < 4; ++c) {
        if (!row[c].is_number()) throw ParseError(where + ": transform_matrix has a non-number");
        c2w(r, c) = row[c].get<double>();
      }
    }
    if (!c2w.allFinite()) throw ParseError(where + ": transform_matrix is not finite");
    const double det = c2w.topLeftCorner<3, 3>().determinant();
    if (!(std::abs(det) > 1e-9)) throw ParseError(where + ": transform_matrix is not invertible");

    Camera& cam = frame.camera;
    cam.world_to_camera = gl_camera_to_world_to_internal(c2w);

    auto w = number(f, "w", i), h = number(f, "h", i);
    if (!w) w = number(doc, "w", i);
    if (!h) h = number(doc, "h", i);
    if (!w || !h) {
      const auto size = png_size(frame_image_path(path, frame.file_path));
      w = size.first;
      h = size.second;
    }
    cam.width = static_cast<int>(*w);
    cam.height = static_cast<int>(*h);

    auto fx = number(f, "fl_x", i), fy = number(f, "fl_y", i);
    if (!fx) fx = number(doc, "fl_x", i);
    if (!fy) fy = number(doc, "fl_y", i);
    if (!fx) {
      auto angle = number(f, "camera_angle_x", i);
      if (!angle) angle = number(doc, "camera_angle_x", i);
      if (!angle) throw ParseError(where + ": needs fl_x or camera_angle_x");
      fx = 0.5 * cam.width / std::tan(0.5 * *angle);
    }
    cam.fx = *fx;
    cam.fy = fy ? *fy : *fx;
    auto cx = number(f, "cx", i), cy = number(f, "cy", i);
    if (!cx) cx = number(doc, "cx", i);
    if (!cy) cy = number(doc, "cy", i);
    cam.cx = cx ? *cx : 0.5 * cam.width;
    cam.cy = cy ? *cy : 0.5 * cam.height;
    cam.near = number(f, "near", i).value_or(number(doc, "near", i).value_or(cam.near));
    cam.far = number(f, "far", i).value_or(number(doc, "far", i).value_or(cam.far));
    try {
      cam.validate();
    } catch (const InvalidParameter& e) {
      throw ParseError(where + ": " + e.what());
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

void save_cameras(const std::filesystem::path& path, const std::vector<CameraFrame>& frames) {
  json doc;
  if (!frames.empty()) {
    const Camera& c = frames[0].camera;
    doc["camera_angle_x"] = 2.0 * std::atan(0.5 * c.width / c.fx);
  }
  doc["frames"] = json::array();
  for (const CameraFrame& f : frames) {
    const Camera& c = f.camera;
    json j;
    j["file_path"] = f.file_path;
    j["fl_x"] = c.fx;
    j["fl_y"] = c.fy;
    j["cx"] = c.cx;
    j["cy"] = c.cy;
    j["w"] = c.width;
    j["h"] = c.height;
    j["near"] = c.near;
    j["far"] = c.far;
    const Mat4 c2w = internal_to_gl_camera_to_world(c.world_to_camera);
    json m = json::array();
    for (int r = 0; r < 4; ++r) m.push_back({c2w(r, 0), c2w(r, 1), c2w(r, 2), c2w(r, 3)});
    j["transform_matrix"] = m;
    doc["frames"].push_back(j);
  }
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

}  // namespace splatir
