// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/gaussian.hpp"

#include "splatir/errors.hpp"

#include <string>

namespace splatir {

Gaussian Gaussian::zeros() {
  Gaussian g;
  g.position.setZero();
  g.log_scale.setZero();
  g.rotation.setZero();
  g.opacity_logit = 0.0;
  g.normal.setZero();
  g.albedo_logit.setZero();
  g.roughness_logit = 0.0;
  g.metallic_logit = 0.0;
  return g;
}

CloudGradient zero_gradient(std::size_t count) {
  return CloudGradient(count, Gaussian::zeros());
}

Vec3 normal_of(const Gaussian& g) {
  const double len = g.normal.norm();
  if (!(len > 1e-12)) return Vec3::UnitZ();
  return g.normal / len;
}

Mat3 quaternion_to_matrix(const Vec4& raw) {
  const Vec4 q = raw.normalized();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

Vec4 matrix_to_quaternion(const Mat3& r) {
  const Eigen::Quaterniond q(r);
  Vec4 out(q.w(), q.x(), q.y(), q.z());
  if (out[0] < 0.0) out = -out;
  return out;
}

Vec4 quaternion_to_matrix_backward(const Vec4& raw, const Mat3& G) {
  const double len = raw.norm();
  const Vec4 q = raw / len;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Vec4 dq;
  dq[0] = 2.0 * (-z * G(0, 1) + y * G(0, 2) + z * G(1, 0) - x * G(1, 2) - y * G(2, 0) +
                 x * G(2, 1));
  dq[1] = 2.0 * (y * G(0, 1) + z * G(0, 2) + y * G(1, 0) - 2.0 * x * G(1, 1) - w * G(1, 2) +
                 z * G(2, 0) + w * G(2, 1) - 2.0 * x * G(2, 2));
  dq[2] = 2.0 * (-2.0 * y * G(0, 0) + x * G(0, 1) + w * G(0, 2) + x * G(1, 0) + z * G(1, 2) -
                 w * G(2, 0) + z * G(2, 1) - 2.0 * y * G(2, 2));
  dq[3] = 2.0 * (-2.0 * z * G(0, 0) - w * G(0, 1) + x * G(0, 2) + w * G(1, 0) -
                 2.0 * z * G(1, 1) + y * G(1, 2) + x * G(2, 0) + y * G(2, 1));
  // Through the normalization q = raw / |raw|.
  return (dq - q * q.dot(dq)) / len;
}

Vec3 normalize_backward(const Vec3& v, const Vec3& grad_u) {
  const double len = v.norm();
  if (!(len > 1e-12)) return Vec3::Zero();
  const Vec3 u = v / len;
  return (grad_u - u * u.dot(grad_u)) / len;
}

Mat3 covariance_3d(const Vec3& scale, const Vec4& rotation) {
  if (!scale.allFinite() || !rotation.allFinite()) {
    throw InvalidParameter("covariance_3d: non-finite scale or rotation");
  }
  if (!(rotation.norm() > 0.0)) {
    throw InvalidParameter("covariance_3d: zero quaternion");
  }
  const Mat3 m = quaternion_to_matrix(rotation) * scale.asDiagonal();
  return m * m.transpose();
}

std::optional<ProjectedGaussian> project_gaussian(const Gaussian& g, const Camera& cam) {
  const Vec3 t = cam.to_camera(g.position);
  if (!(t.z() > cam.near) || !(t.z() < cam.far)) return std::nullopt;

  const double inv_z = 1.0 / t.z();
  Eigen::Matrix<double, 2, 3> J;
  J << cam.fx * inv_z, 0.0, -cam.fx * t.x() * inv_z * inv_z,
      0.0, cam.fy * inv_z, -cam.fy * t.y() * inv_z * inv_z;
  const Mat3 W = cam.rotation();
  const Mat3 sigma = covariance_3d(scale_of(g), g.rotation);
  const Eigen::Matrix<double, 2, 3> JW = J * W;

  ProjectedGaussian out;
  out.mean = Vec2(cam.fx * t.x() * inv_z + cam.cx, cam.fy * t.y() * inv_z + cam.cy);
  out.cov = JW * sigma * JW.transpose();
  out.cov(0, 0) += kScreenDilation;
  out.cov(1, 1) += kScreenDilation;
  out.cov(0, 1) = out.cov(1, 0) = 0.5 * (out.cov(0, 1) + out.cov(1, 0));
  out.depth = t.z();
  return out;
}

Vec3 sh_color(const Gaussian& g, int sh_degree, const Vec3& view_dir) {
  if (sh_degree < 0 || sh_degree > kMaxShDegree) {
    throw InvalidParameter("sh_color: coefficient count does not match a degree in [0, 3] (" +
                           std::to_string(sh_degree) + ")");
  }
  std::array<double, kMaxShCoeffs> basis{};
  sh_eval(sh_degree, view_dir, basis);
  Vec3 c = Vec3::Constant(kShColorOffset);
  for (int k = 0; k < sh_coeff_count(sh_degree); ++k) c += basis[k] * g.sh[k];
  return c.cwiseMax(0.0);
}

Vec3 shortest_axis(const Gaussian& g) {
  int axis = 0;
  g.log_scale.minCoeff(&axis);
  return quaternion_to_matrix(g.rotation).col(axis);
}

}  // namespace splatir
