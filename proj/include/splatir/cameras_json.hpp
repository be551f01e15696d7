// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/camera.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace splatir {

struct CameraFrame {
  Camera camera;
  std::string file_path;  // as written in the file, relative to its directory
};

/// Converts an OpenGL-style camera-to-world matrix (x right, y up, looking down -z) to
/// the internal world-to-camera matrix (x right, y down, looking down +z):
///   world_to_camera = (c2w * diag(1, -1, -1, 1))^-1
Mat4 gl_camera_to_world_to_internal(const Mat4& c2w);
Mat4 internal_to_gl_camera_to_world(const Mat4& world_to_camera);

/// NeRF-synthetic transforms JSON. Intrinsics come from per-frame fl_x/fl_y/cx/cy or from
/// camera_angle_x; resolution from w/h (per frame or top level) or the frame's PNG header.
std::vector<CameraFrame> load_cameras(const std::filesystem::path& path);
void save_cameras(const std::filesystem::path& path, const std::vector<CameraFrame>& frames);

/// Resolves a frame's image path relative to the JSON file, appending ".png" when the
/// path has no extension.
std::filesystem::path frame_image_path(const std::filesystem::path& json_path,
                                       const std::string& file_path);

}  // namespace splatir
