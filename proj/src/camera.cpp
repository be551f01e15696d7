// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/camera.hpp"

#include "splatir/errors.hpp"

#include <cmath>
#include <string>

namespace splatir {

void Camera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw InvalidParameter("camera focal lengths must be positive and finite");
  }
  if (!(near > 0.0) || !(near < far)) {
    throw InvalidParameter("camera clip planes must satisfy 0 < near < far");
  }
  if (width <= 0 || height <= 0) {
    throw InvalidParameter("camera resolution must be positive");
  }
  if (!world_to_camera.allFinite()) {
    throw InvalidParameter("camera extrinsics contain non-finite values");
  }
  const Mat3 r = rotation();
  const double err = (r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (err > 1e-6) {
    throw InvalidParameter("camera rotation is not orthonormal (error " + std::to_string(err) +
                           ")");
  }
}

Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, int width, int height,
               double fov_x_radians, double near, double far) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) {
    // Looking along `up`: pick any perpendicular.
    right = forward.unitOrthogonal();
  }
  right.normalize();
  const Vec3 down = forward.cross(right);

  Camera cam;
  cam.width = width;
  cam.height = height;
  cam.fx = 0.5 * width / std::tan(0.5 * fov_x_radians);
  cam.fy = cam.fx;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.near = near;
  cam.far = far;
  Mat3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  cam.world_to_camera.setIdentity();
  cam.world_to_camera.topLeftCorner<3, 3>() = r;
  cam.world_to_camera.topRightCorner<3, 1>() = -r * eye;
  return cam;
}

}  // namespace splatir
