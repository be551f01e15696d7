// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/camera.hpp"
#include "splatir/math.hpp"
#include "splatir/sh.hpp"

#include <array>
#include <optional>
#include <vector>

namespace splatir {

/// One splat, stored as unconstrained raw parameters. The geometric set is
/// {position, scale, rotation, normal}, appearance is {opacity, sh}, material is
/// {albedo, roughness, metallic}. Use the accessors below to read activated values.
struct Gaussian {
  Vec3 position = Vec3::Zero();
  Vec3 log_scale = Vec3::Zero();
  Vec4 rotation = Vec4(1.0, 0.0, 0.0, 0.0);  // (w, x, y, z), Hamilton convention
  double opacity_logit = 0.0;
  std::array<Vec3, kMaxShCoeffs> sh = zero_sh();  // sh[k] holds RGB of coefficient k
  Vec3 normal = Vec3(0.0, 0.0, 1.0);
  Vec3 albedo_logit = Vec3::Zero();
  double roughness_logit = 0.0;
  double metallic_logit = 0.0;

  /// All-zero parameter vector, used as a gradient accumulator.
  static Gaussian zeros();

  static std::array<Vec3, kMaxShCoeffs> zero_sh() {
    std::array<Vec3, kMaxShCoeffs> sh;
    sh.fill(Vec3::Zero());
    return sh;
  }
};

struct GaussianCloud {
  int sh_degree = 3;
  std::vector<Gaussian> gaussians;

  std::size_t size() const { return gaussians.size(); }
  bool empty() const { return gaussians.empty(); }
};

/// Per-Gaussian derivatives with respect to the raw parameters, same layout as the cloud.
using CloudGradient = std::vector<Gaussian>;

CloudGradient zero_gradient(std::size_t count);

// Activations.
inline Vec3 scale_of(const Gaussian& g) { return g.log_scale.array().exp(); }
inline double opacity_of(const Gaussian& g) { return sigmoid(g.opacity_logit); }
inline Vec3 albedo_of(const Gaussian& g) {
  return {sigmoid(g.albedo_logit.x()), sigmoid(g.albedo_logit.y()), sigmoid(g.albedo_logit.z())};
}
inline double roughness_of(const Gaussian& g) { return sigmoid(g.roughness_logit); }
inline double metallic_of(const Gaussian& g) { return sigmoid(g.metallic_logit); }
/// Unit normal; a zero raw normal yields +z.
Vec3 normal_of(const Gaussian& g);

/// Rotation matrix of a (w, x, y, z) quaternion, normalized first.
Mat3 quaternion_to_matrix(const Vec4& q);

/// Quaternion (w, x, y, z) of a proper rotation matrix.
Vec4 matrix_to_quaternion(const Mat3& r);

/// Given dL/dR for R = quaternion_to_matrix(q), returns dL/dq for the raw (unnormalized) q.
Vec4 quaternion_to_matrix_backward(const Vec4& q, const Mat3& grad_r);

/// Returns dL/dv for u = v / |v| given dL/du.
Vec3 normalize_backward(const Vec3& v, const Vec3& grad_u);

/// Sigma = R S S^T R^T. Throws InvalidParameter on non-finite input.
Mat3 covariance_3d(const Vec3& scale, const Vec4& rotation);

/// Screen-space footprint of a Gaussian. `cov` already includes the dilation.
struct ProjectedGaussian {
  Vec2 mean;
  Mat2 cov;
  double depth = 0.0;  // camera-space z
};

/// Isotropic low-pass added to the projected covariance diagonal, in pixels^2.
inline constexpr double kScreenDilation = 0.3;

/// Perspective projection of center and covariance (EWA affine approximation).
/// Returns nullopt when the center is not in front of the near plane or beyond far.
std::optional<ProjectedGaussian> project_gaussian(const Gaussian& g, const Camera& cam);

/// View-dependent color: per-channel SH dot product plus 0.5, clamped at 0 from below.
/// `view_dir` points from the camera toward the Gaussian. Throws InvalidParameter if
/// `coeff_count` is not a valid SH length or exceeds the storage.
Vec3 sh_color(const Gaussian& g, int sh_degree, const Vec3& view_dir);

/// Offset added to the SH dot product when producing colors.
inline constexpr double kShColorOffset = 0.5;

/// Rotated axis of the smallest scale component: the flattest direction of the splat.
Vec3 shortest_axis(const Gaussian& g);

}  // namespace splatir
