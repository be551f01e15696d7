// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/image.hpp"
#include "splatir/math.hpp"

#include <array>
#include <span>
#include <vector>

namespace splatir {

/// Trainable lat-long environment, +Z up. Row r spans theta in [r, r+1] * pi / H, column c
/// spans phi in [c, c+1] * 2pi / W - pi. Radiance is softplus of the raw texels.
struct EnvironmentMap {
  int height = 16;
  int width = 32;
  std::vector<double> raw;  // (row * width + col) * 3 + channel

  EnvironmentMap() = default;
  EnvironmentMap(int h, int w, double raw_fill = 0.0);

  static EnvironmentMap from_radiance(const Image& radiance);
  Image radiance() const;
  Vec3 texel_radiance(int row, int col) const;
  std::size_t texel_count() const { return static_cast<std::size_t>(height) * width; }

  Vec3 texel_direction(int row, int col) const;
  double texel_solid_angle(int row) const;
};

/// Direction to continuous lat-long pixel coordinates (column, row), texel centers at +0.5.
Vec2 direction_to_latlong(const Vec3& dir, int height, int width);

struct BilinearTaps {
  std::array<std::size_t, 4> texels{};
  std::array<double, 4> weights{};
};

/// Four texels around a direction; longitude wraps, latitude clamps.
BilinearTaps latlong_taps(const Vec3& dir, int height, int width);

/// GGX-prefiltered chain. Level l holds the lobe-weighted average for roughness l / (L - 1);
/// level 0 is the source. Each level is a fixed linear operator on the radiance texels.
struct PrefilteredEnv {
  int height = 0;
  int width = 0;
  int levels = 0;
  std::vector<std::vector<double>> images;  // per level, texel-major RGB
  std::vector<std::vector<double>> operators;  // per level, [out * N + in] (empty for level 0)

  /// Trilinear (bilinear + linear between levels) sample.
  Vec3 sample(const Vec3& dir, double roughness) const;
  /// Accumulates gradients of sample() into per-level texel gradients and returns
  /// d(sample)/d(roughness) per channel.
  Vec3 sample_backward(const Vec3& dir, double roughness, const Vec3& grad_out,
                       std::vector<std::vector<double>>& level_grads) const;
  /// Maps per-level texel gradients back to source radiance texels.
  std::vector<double> to_source_gradient(const std::vector<std::vector<double>>& level_grads) const;
};

/// Builds the operators for an env resolution (independent of the texel values).
PrefilteredEnv make_prefilter(int height, int width, int levels);
/// Applies the operators to new radiance values.
void update_prefilter(PrefilteredEnv& pre, const Image& radiance);
PrefilteredEnv prefilter_environment(const EnvironmentMap& env, int levels);

inline constexpr int kEnvShDegree = 2;
inline constexpr int kEnvShCoeffs = 9;

/// Degree-2 SH projection of the radiance, channel-major [c * 9 + k].
std::array<double, 3 * kEnvShCoeffs> env_sh_project(const Image& radiance);

/// Cosine-convolved irradiance about n from projected SH, clamped at 0.
Vec3 env_irradiance(std::span<const double> sh, const Vec3& n);
/// d(irradiance)/d(sh) accumulated into grad_sh.
void env_irradiance_backward(std::span<const double> sh, const Vec3& n, const Vec3& grad_out,
                             std::span<double> grad_sh);
/// Maps SH gradients to radiance-texel gradients (the projection is linear).
std::vector<double> env_sh_project_backward(int height, int width, std::span<const double> grad_sh);

}  // namespace splatir
