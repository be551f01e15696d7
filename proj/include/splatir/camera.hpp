// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/math.hpp"

namespace splatir {

/// Pinhole camera. Camera space is +z forward, +x right, +y down; pixel (i, j)
/// covers [i, i+1) x [j, j+1) and is sampled at its center (i + 0.5, j + 0.5).
struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Mat4 world_to_camera = Mat4::Identity();
  int width = 1;
  int height = 1;
  double near = 0.01;
  double far = 100.0;

  Mat3 rotation() const { return world_to_camera.topLeftCorner<3, 3>(); }
  Vec3 translation() const { return world_to_camera.topRightCorner<3, 1>(); }
  /// Camera center in world coordinates.
  Vec3 center() const { return -rotation().transpose() * translation(); }
  Vec3 to_camera(const Vec3& world) const { return rotation() * world + translation(); }

  /// Camera-space point on the ray through pixel coordinate (u, v) at depth z.
  Vec3 unproject(double u, double v, double z) const {
    return {(u - cx) / fx * z, (v - cy) / fy * z, z};
  }

  /// Throws InvalidParameter if intrinsics, clip planes or the rotation block are invalid.
  void validate() const;
};

/// Camera at `eye` looking at `target`; `up` is the world direction that should appear
/// upward in the image.
Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, int width, int height,
               double fov_x_radians, double near = 0.01, double far = 100.0);

}  // namespace splatir
