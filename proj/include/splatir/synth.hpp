// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/brdf.hpp"
#include "splatir/camera.hpp"
#include "splatir/environment.hpp"
#include "splatir/gaussian.hpp"
#include "splatir/image.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace splatir {

enum class SynthKind { kSphere, kBox, kShell };

std::string_view to_string(SynthKind kind);
SynthKind parse_synth_kind(std::string_view name);

struct SynthParams {
  int count = 2000;          // Gaussians (split over both layers for a shell)
  double radius = 1.0;       // sphere/shell outer radius, box half-extent
  double thickness = 0.15;   // shell only
  double opacity = 0.95;
  double disc_flatness = 0.1;  // thinnest scale / in-plane scale
  int sh_degree = 3;
  int views = 16;
  int test_views = 4;
  int width = 64;
  int height = 64;
  double camera_distance = 3.0;
  double fov_x = 0.9;  // radians
  int env_height = 16;
  int env_width = 32;
};

/// Ground-truth surface sample along a camera ray.
struct SurfaceHit {
  Vec3 point;
  Vec3 normal;  // world space, unit, facing the ray origin side
  double depth;  // camera-space z
};

struct SynthScene {
  SynthKind kind = SynthKind::kSphere;
  SynthParams params;
  GaussianCloud cloud;  // ground truth geometry and materials
  EnvironmentMap env;
  std::vector<Camera> train_cameras;
  std::vector<Camera> test_cameras;

  /// First intersection of the pixel-center ray with the analytic surface.
  std::optional<SurfaceHit> intersect(const Camera& cam, int px, int py) const;
  Material material_at(const Vec3& point) const;
};

/// Deterministic for a given seed. Throws InvalidParameter for count < 8 or bad ranges.
SynthScene synth_scene(SynthKind kind, const SynthParams& params, std::uint64_t seed);

/// Radiance of the default sky: a vertical gradient plus a soft sun lobe.
Vec3 sky_radiance(const Vec3& dir);

struct GroundTruthMaps {
  Image depth;   // camera z, far where missed
  Image normal;  // world, zero where missed
  Image albedo;  // zero where missed
  Mask mask;
};

GroundTruthMaps ground_truth_maps(const SynthScene& scene, const Camera& cam);

/// Starting point for geometry fitting: positions jittered by `jitter` * radius, colors
/// reset to flat gray, normals tilted randomly away from the truth and materials reset
/// to the loader defaults.
GaussianCloud fitting_init(const SynthScene& scene, std::uint64_t seed, double jitter = 0.02);

}  // namespace splatir
