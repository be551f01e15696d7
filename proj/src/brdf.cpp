// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/brdf.hpp"

#include "splatir/errors.hpp"
#include "splatir/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace splatir {

double ggx_distribution(double n_dot_h, double roughness) {
  const double a2 = ggx_alpha(roughness) * ggx_alpha(roughness);
  const double d = n_dot_h * n_dot_h * (a2 - 1.0) + 1.0;
  return a2 / (kPi * d * d);
}

double smith_visibility(double n_dot_v, double n_dot_l, double roughness) {
  const double a2 = ggx_alpha(roughness) * ggx_alpha(roughness);
  const double nv = std::max(n_dot_v, kMinCosine);
  const double nl = std::max(n_dot_l, kMinCosine);
  const double gv = nl * std::sqrt(nv * nv * (1.0 - a2) + a2);
  const double gl = nv * std::sqrt(nl * nl * (1.0 - a2) + a2);
  return 0.5 / (gv + gl);
}

Vec3 schlick_fresnel(const Vec3& f0, double v_dot_h) {
  const double f = std::pow(1.0 - std::clamp(v_dot_h, 0.0, 1.0), 5.0);
  return f0 + (Vec3::Ones() - f0) * f;
}

Vec3 brdf_specular(const Vec3& n, const Vec3& v, const Vec3& l, const Material& mat) {
  const Vec3 h = (v + l).normalized();
  const double nh = std::max(n.dot(h), 0.0);
  const double D = ggx_distribution(nh, mat.roughness);
  const Vec3 F = schlick_fresnel(base_reflectance(mat.albedo, mat.metallic), v.dot(h));
  const double V = smith_visibility(n.dot(v), n.dot(l), mat.roughness);
  return D * V * F;
}

Vec3 brdf_eval(const Vec3& n, const Vec3& v, const Vec3& l, const Material& mat) {
  return (1.0 - mat.metallic) * mat.albedo / kPi + brdf_specular(n, v, l, mat);
}

double BrdfLut::nv_node(int i) const {
  return std::max(static_cast<double>(i) / (resolution - 1), 1e-3);
}

double BrdfLut::roughness_node(int j) const { return static_cast<double>(j) / (resolution - 1); }

BrdfLut::Sample BrdfLut::lookup(double n_dot_v, double roughness) const {
  const int r = resolution;
  const double ti = std::clamp(n_dot_v, 0.0, 1.0) * (r - 1);
  const double tj = std::clamp(roughness, 0.0, 1.0) * (r - 1);
  const int i0 = std::min(static_cast<int>(ti), r - 2);
  const int j0 = std::min(static_cast<int>(tj), r - 2);
  const double fi = ti - i0, fj = tj - j0;
  auto at = [&](const std::vector<double>& t, int i, int j) {
    return t[static_cast<std::size_t>(j) * r + i];
  };
  auto lerp_i = [&](const std::vector<double>& t, int j) {
    return (1.0 - fi) * at(t, i0, j) + fi * at(t, i0 + 1, j);
  };
  Sample s;
  const double s0 = lerp_i(scale, j0), s1 = lerp_i(scale, j0 + 1);
  const double b0 = lerp_i(bias, j0), b1 = lerp_i(bias, j0 + 1);
  s.scale = (1.0 - fj) * s0 + fj * s1;
  s.bias = (1.0 - fj) * b0 + fj * b1;
  const bool inside = roughness > 0.0 && roughness < 1.0;
  s.d_scale_d_roughness = inside ? (s1 - s0) * (r - 1) : 0.0;
  s.d_bias_d_roughness = inside ? (b1 - b0) * (r - 1) : 0.0;
  return s;
}

namespace {

double radical_inverse(std::uint32_t bits) {
  bits = (bits << 16u) | (bits >> 16u);
  bits = ((bits & 0x55555555u) << 1u) | ((bits & 0xAAAAAAAAu) >> 1u);
  bits = ((bits & 0x33333333u) << 2u) | ((bits & 0xCCCCCCCCu) >> 2u);
  bits = ((bits & 0x0F0F0F0Fu) << 4u) | ((bits & 0xF0F0F0F0u) >> 4u);
  bits = ((bits & 0x00FF00FFu) << 8u) | ((bits & 0xFF00FF00u) >> 8u);
  return bits * 2.3283064365386963e-10;
}

}  // namespace

std::pair<double, double> integrate_env_brdf(double n_dot_v, double roughness, int samples,
                                             std::uint64_t seed) {
  if (samples < 1) throw InvalidParameter("LUT sample count must be positive");
  const double nv = std::clamp(n_dot_v, 1e-3, 1.0);
  const Vec3 v(std::sqrt(1.0 - nv * nv), 0.0, nv);
  const double a2 = ggx_alpha(roughness) * ggx_alpha(roughness);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double shift1 = uni(rng), shift2 = uni(rng);
  double scale = 0.0, bias = 0.0;
  for (int s = 0; s < samples; ++s) {
    double u1 = (s + 0.5) / samples + shift1;
    double u2 = radical_inverse(static_cast<std::uint32_t>(s)) + shift2;
    u1 -= std::floor(u1);
    u2 -= std::floor(u2);
    const double phi = 2.0 * kPi * u1;
    const double cos_t = std::sqrt((1.0 - u2) / (1.0 + (a2 - 1.0) * u2));
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const Vec3 h(sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t);
    const double vh = v.dot(h);
    const Vec3 l = 2.0 * vh * h - v;
    const double nl = l.z(), nh = h.z();
    if (nl <= 0.0 || vh <= 0.0) continue;
    const double g_vis = 4.0 * smith_visibility(nv, nl, roughness) * nl * vh / nh;
    const double fc = std::pow(1.0 - vh, 5.0);
    scale += (1.0 - fc) * g_vis;
    bias += fc * g_vis;
  }
  return {scale / samples, bias / samples};
}

BrdfLut precompute_env_brdf_lut(int samples, int resolution, std::uint64_t seed) {
  if (resolution < 16) throw InvalidParameter("LUT resolution must be at least 16");
  BrdfLut lut;
  lut.resolution = resolution;
  const std::size_t n = static_cast<std::size_t>(resolution) * resolution;
  lut.scale.assign(n, 0.0);
  lut.bias.assign(n, 0.0);
  parallel_for(n, 0, [&](std::size_t e) {
    const int i = static_cast<int>(e % resolution), j = static_cast<int>(e / resolution);
    const auto [s, b] =
        integrate_env_brdf(lut.nv_node(i), lut.roughness_node(j), samples, seed * 0x9E3779B97F4A7C15ull + e);
    lut.scale[e] = s;
    lut.bias[e] = b;
  });
  return lut;
}

}  // namespace splatir
