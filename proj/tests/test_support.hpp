// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

// Scene builders and parameter packing shared by the unit and acceptance tests.

#pragma once

#include "splatir/camera.hpp"
#include "splatir/gaussian.hpp"
#include "splatir/image.hpp"
#include "splatir/rasterizer.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace splatir::testing {

inline constexpr int kParamsPerGaussian = 3 + 3 + 4 + 1 + 3 * kMaxShCoeffs + 3 + 3 + 1 + 1;

/// Pinhole camera at the origin looking down +z.
inline Camera axis_camera(int width, int height, double focal) {
  Camera cam;
  cam.width = width;
  cam.height = height;
  cam.fx = cam.fy = focal;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.near = 0.1;
  cam.far = 100.0;
  return cam;
}

inline Vec4 random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec4 q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

struct RandomSceneOptions {
  int count = 8;
  double min_depth = 2.0;
  double max_depth = 5.0;
  double min_scale = 0.05;
  double max_scale = 0.4;
  double min_opacity = 0.2;
  double max_opacity = 0.95;
  int sh_degree = 3;
  double sh_amplitude = 0.3;
};

/// Random Gaussians inside the view frustum of `cam` (which must be axis_camera-like).
inline GaussianCloud random_cloud(std::mt19937_64& rng, const Camera& cam,
                                  const RandomSceneOptions& o = {}) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  GaussianCloud cloud;
  cloud.sh_degree = o.sh_degree;
  for (int i = 0; i < o.count; ++i) {
    Gaussian g;
    const double z = o.min_depth + (o.max_depth - o.min_depth) * u(rng);
    const double px = (0.15 + 0.7 * u(rng)) * cam.width;
    const double py = (0.15 + 0.7 * u(rng)) * cam.height;
    g.position = Vec3((px - cam.cx) / cam.fx * z, (py - cam.cy) / cam.fy * z, z);
    for (int k = 0; k < 3; ++k) {
      g.log_scale[k] = std::log(o.min_scale + (o.max_scale - o.min_scale) * u(rng));
    }
    g.rotation = random_quaternion(rng);
    g.opacity_logit = logit(o.min_opacity + (o.max_opacity - o.min_opacity) * u(rng));
    for (int k = 0; k < sh_coeff_count(o.sh_degree); ++k) {
      g.sh[k] = o.sh_amplitude * Vec3(n(rng), n(rng), n(rng)) / (k == 0 ? 1.0 : 2.0);
    }
    g.normal = Vec3(n(rng), n(rng), n(rng) - 2.0).normalized();
    g.albedo_logit = Vec3(n(rng), n(rng), n(rng));
    g.roughness_logit = n(rng);
    g.metallic_logit = n(rng);
    cloud.gaussians.push_back(g);
  }
  return cloud;
}

inline std::vector<double> pack(const GaussianCloud& cloud) {
  std::vector<double> p;
  p.reserve(cloud.size() * kParamsPerGaussian);
  for (const Gaussian& g : cloud.gaussians) {
    p.insert(p.end(), g.position.data(), g.position.data() + 3);
    p.insert(p.end(), g.log_scale.data(), g.log_scale.data() + 3);
    p.insert(p.end(), g.rotation.data(), g.rotation.data() + 4);
    p.push_back(g.opacity_logit);
    for (const Vec3& c : g.sh) p.insert(p.end(), c.data(), c.data() + 3);
    p.insert(p.end(), g.normal.data(), g.normal.data() + 3);
    p.insert(p.end(), g.albedo_logit.data(), g.albedo_logit.data() + 3);
    p.push_back(g.roughness_logit);
    p.push_back(g.metallic_logit);
  }
  return p;
}

inline void unpack(const double* p, GaussianCloud& cloud) {
  for (Gaussian& g : cloud.gaussians) {
    for (int k = 0; k < 3; ++k) g.position[k] = *p++;
    for (int k = 0; k < 3; ++k) g.log_scale[k] = *p++;
    for (int k = 0; k < 4; ++k) g.rotation[k] = *p++;
    g.opacity_logit = *p++;
    for (Vec3& c : g.sh) {
      for (int k = 0; k < 3; ++k) c[k] = *p++;
    }
    for (int k = 0; k < 3; ++k) g.normal[k] = *p++;
    for (int k = 0; k < 3; ++k) g.albedo_logit[k] = *p++;
    g.roughness_logit = *p++;
    g.metallic_logit = *p++;
  }
}

/// Gradient cloud packed in the same order as pack().
inline std::vector<double> pack(const CloudGradient& grad) {
  GaussianCloud c;
  c.gaussians = grad;
  return pack(c);
}

inline const char* param_name(int slot) {
  if (slot < 3) return "position";
  if (slot < 6) return "log_scale";
  if (slot < 10) return "rotation";
  if (slot < 11) return "opacity";
  if (slot < 11 + 3 * kMaxShCoeffs) return "sh";
  if (slot < 14 + 3 * kMaxShCoeffs) return "normal";
  if (slot < 17 + 3 * kMaxShCoeffs) return "albedo";
  if (slot < 18 + 3 * kMaxShCoeffs) return "roughness";
  return "metallic";
}

inline Image random_image(std::mt19937_64& rng, int w, int h, int c, double lo = 0.0,
                          double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Image img(w, h, c);
  for (double& v : img.data) v = u(rng);
  return img;
}

inline double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace splatir::testing
