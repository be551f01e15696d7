// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/brdf.hpp"
#include "splatir/camera.hpp"
#include "splatir/environment.hpp"
#include "splatir/gaussian.hpp"
#include "splatir/volumes.hpp"

#include <array>
#include <vector>

namespace splatir {

inline constexpr int kPrefilterLevels = 5;

/// Lighting state read by shade(). The derived members (prefiltered chain and the
/// environment's irradiance SH) must be refreshed whenever the environment changes.
struct ShadingScene {
  const EnvironmentMap* env = nullptr;
  const BrdfLut* lut = nullptr;
  const VolumeGrid* occlusion = nullptr;     // optional; no occlusion when null
  const VolumeGrid* illumination = nullptr;  // optional; no indirect light when null
  PrefilteredEnv prefiltered;
  std::array<double, 3 * kEnvShCoeffs> env_sh{};
};

ShadingScene make_shading_scene(const EnvironmentMap& env, const BrdfLut& lut,
                                const VolumeGrid* occlusion, const VolumeGrid* illumination,
                                int levels = kPrefilterLevels);
void refresh_lighting(ShadingScene& scene);

struct ShadeResult {
  Vec3 diffuse = Vec3::Zero();
  Vec3 specular = Vec3::Zero();
  Vec3 total = Vec3::Zero();
  double occlusion = 0.0;
};

/// Outgoing radiance toward v at x:
///   diffuse  = (1 - m) a / pi * ((1 - O) E_env(n) + O E_indirect(x, n))
///   specular = (F0 * scale + bias) * prefiltered(reflect(-v, n), roughness)
/// with O the ambient occlusion at x. Specular is 0 when n.v <= 0.
ShadeResult shade(const Material& mat, const Vec3& n, const Vec3& x, const Vec3& v,
                  const ShadingScene& scene);

/// Gradient accumulators for the lighting inputs of shade().
struct LightingGradients {
  std::array<double, 3 * kEnvShCoeffs> env_sh{};
  std::vector<std::vector<double>> levels;
  std::vector<double> illumination;

  explicit LightingGradients(const ShadingScene& scene);
  /// dL/d(raw environment texels).
  std::vector<double> env_raw_gradient(const ShadingScene& scene) const;
};

struct MaterialGradient {
  Vec3 albedo = Vec3::Zero();
  double roughness = 0.0;
  double metallic = 0.0;
};

/// Backward of shade(...).total with the occlusion held fixed.
MaterialGradient shade_backward(const Material& mat, const Vec3& n, const Vec3& x, const Vec3& v,
                                const ShadingScene& scene, const Vec3& grad_total,
                                LightingGradients* lighting);

Material material_of(const Gaussian& g);

/// Shaded color of every Gaussian as seen from the camera center.
std::vector<Vec3> shade_cloud(const GaussianCloud& cloud, const Camera& cam,
                              const ShadingScene& scene);

/// Chains per-Gaussian color gradients into material logits (added to `cloud_grad`) and
/// into the lighting accumulators.
void shade_cloud_backward(const GaussianCloud& cloud, const Camera& cam,
                          const ShadingScene& scene, const std::vector<Vec3>& grad_colors,
                          CloudGradient& cloud_grad, LightingGradients* lighting);

/// Ambient occlusion of every Gaussian (0 when the scene has no occlusion grid).
std::vector<double> cloud_ambient_occlusion(const GaussianCloud& cloud, const ShadingScene& scene);

}  // namespace splatir
