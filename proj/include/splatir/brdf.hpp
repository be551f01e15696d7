// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/math.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace splatir {

struct Material {
  Vec3 albedo = Vec3::Constant(0.5);
  double roughness = 0.9;
  double metallic = 0.0;
};

/// Cosines below this are clamped before they enter a denominator.
inline constexpr double kMinCosine = 1e-4;
/// Lower bound on the GGX alpha so the mirror limit stays finite.
inline constexpr double kMinGgxAlpha = 1e-4;

inline double ggx_alpha(double roughness) { return std::max(roughness * roughness, kMinGgxAlpha); }

/// GGX normal distribution for alpha = roughness^2.
double ggx_distribution(double n_dot_h, double roughness);

/// Height-correlated Smith visibility G / (4 n.l n.v).
double smith_visibility(double n_dot_v, double n_dot_l, double roughness);

inline Vec3 base_reflectance(const Vec3& albedo, double metallic) {
  return Vec3::Constant(0.04 * (1.0 - metallic)) + metallic * albedo;
}

/// Schlick Fresnel with v.h.
Vec3 schlick_fresnel(const Vec3& f0, double v_dot_h);

/// Lambert diffuse (1-m) a / pi plus GGX/Schlick/Smith specular.
Vec3 brdf_eval(const Vec3& n, const Vec3& v, const Vec3& l, const Material& mat);
Vec3 brdf_specular(const Vec3& n, const Vec3& v, const Vec3& l, const Material& mat);

/// Split-sum environment BRDF table: for each (n.v, roughness) node, the scale and bias
/// that multiply F0. Node i in n.v is max(i / (res - 1), 1e-3); node j in roughness is
/// j / (res - 1).
struct BrdfLut {
  int resolution = 0;
  std::vector<double> scale;  // [j * res + i], j roughness, i n.v
  std::vector<double> bias;

  struct Sample {
    double scale;
    double bias;
    double d_scale_d_roughness;
    double d_bias_d_roughness;
  };
  /// Bilinear lookup with clamping.
  Sample lookup(double n_dot_v, double roughness) const;
  double nv_node(int i) const;
  double roughness_node(int j) const;
};

/// GGX importance sampling with a Cranley-Patterson rotated Hammersley set per entry;
/// the rotation is seeded from (seed, entry), so results depend only on the arguments.
BrdfLut precompute_env_brdf_lut(int samples, int resolution, std::uint64_t seed = 1);

/// One table entry computed the same way, exposed for tests.
std::pair<double, double> integrate_env_brdf(double n_dot_v, double roughness, int samples,
                                             std::uint64_t seed);

}  // namespace splatir
