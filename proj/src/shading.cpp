// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/shading.hpp"

#include "splatir/errors.hpp"

#include <algorithm>
#include <cmath>

namespace splatir {

ShadingScene make_shading_scene(const EnvironmentMap& env, const BrdfLut& lut,
                                const VolumeGrid* occlusion, const VolumeGrid* illumination,
                                int levels) {
  if (lut.resolution < 2) throw InvalidParameter("shading: BRDF table is empty");
  ShadingScene s;
  s.env = &env;
  s.lut = &lut;
  s.occlusion = occlusion;
  s.illumination = illumination;
  s.prefiltered = make_prefilter(env.height, env.width, levels);
  refresh_lighting(s);
  return s;
}

void refresh_lighting(ShadingScene& scene) {
  const Image radiance = scene.env->radiance();
  update_prefilter(scene.prefiltered, radiance);
  scene.env_sh = env_sh_project(radiance);
}

namespace {

struct ShadeTerms {
  double occlusion = 0.0;
  Vec3 irradiance_env = Vec3::Zero();
  Vec3 irradiance_indirect = Vec3::Zero();
  Vec3 irradiance = Vec3::Zero();
  bool specular = false;
  double n_dot_v = 0.0;
  Vec3 reflected = Vec3::Zero();
  BrdfLut::Sample lut{};
  Vec3 prefiltered = Vec3::Zero();
  Vec3 f0 = Vec3::Zero();
};

ShadeTerms shade_terms(const Material& mat, const Vec3& n, const Vec3& x, const Vec3& v,
                       const ShadingScene& scene) {
  ShadeTerms t;
  if (scene.occlusion) t.occlusion = ambient_occlusion(*scene.occlusion, x, n);
  t.irradiance_env = env_irradiance(scene.env_sh, n);
  if (scene.illumination) t.irradiance_indirect = query_indirect_irradiance(*scene.illumination, x, n);
  t.irradiance = (1.0 - t.occlusion) * t.irradiance_env + t.occlusion * t.irradiance_indirect;
  t.f0 = base_reflectance(mat.albedo, mat.metallic);
  t.n_dot_v = n.dot(v);
  if (t.n_dot_v > 0.0) {
    t.specular = true;
    t.reflected = 2.0 * t.n_dot_v * n - v;
    t.lut = scene.lut->lookup(t.n_dot_v, mat.roughness);
    t.prefiltered = scene.prefiltered.sample(t.reflected, mat.roughness);
  }
  return t;
}

}  // namespace

ShadeResult shade(const Material& mat, const Vec3& n, const Vec3& x, const Vec3& v,
                  const ShadingScene& scene) {
  const ShadeTerms t = shade_terms(mat, n, x, v, scene);
  ShadeResult r;
  r.occlusion = t.occlusion;
  r.diffuse = (1.0 - mat.metallic) / kPi * mat.albedo.cwiseProduct(t.irradiance);
  if (t.specular) {
    r.specular = (t.f0 * t.lut.scale + Vec3::Constant(t.lut.bias)).cwiseProduct(t.prefiltered);
  }
  r.total = (r.diffuse + r.specular).cwiseMax(0.0);
  return r;
}

LightingGradients::LightingGradients(const ShadingScene& scene) {
  const std::size_t n = static_cast<std::size_t>(scene.env->height) * scene.env->width * 3;
  levels.assign(scene.prefiltered.levels, std::vector<double>(n, 0.0));
  if (scene.illumination) illumination.assign(scene.illumination->coeffs.size(), 0.0);
}

std::vector<double> LightingGradients::env_raw_gradient(const ShadingScene& scene) const {
  std::vector<double> g = scene.prefiltered.to_source_gradient(levels);
  const std::vector<double> g_sh =
      env_sh_project_backward(scene.env->height, scene.env->width, env_sh);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = (g[i] + g_sh[i]) * sigmoid(scene.env->raw[i]);
  }
  return g;
}

MaterialGradient shade_backward(const Material& mat, const Vec3& n, const Vec3& x, const Vec3& v,
                                const ShadingScene& scene, const Vec3& grad_total,
                                LightingGradients* lighting) {
  const ShadeTerms t = shade_terms(mat, n, x, v, scene);
  Vec3 g = grad_total;
  {
    const Vec3 diffuse = (1.0 - mat.metallic) / kPi * mat.albedo.cwiseProduct(t.irradiance);
    Vec3 spec = Vec3::Zero();
    if (t.specular) {
      spec = (t.f0 * t.lut.scale + Vec3::Constant(t.lut.bias)).cwiseProduct(t.prefiltered);
    }
    for (int c = 0; c < 3; ++c) {
      if (diffuse[c] + spec[c] < 0.0) g[c] = 0.0;
    }
  }
  MaterialGradient out;
  // Diffuse.
  out.albedo += (1.0 - mat.metallic) / kPi * t.irradiance.cwiseProduct(g);
  out.metallic -= mat.albedo.cwiseProduct(t.irradiance).dot(g) / kPi;
  if (lighting) {
    const Vec3 g_irr = (1.0 - mat.metallic) / kPi * mat.albedo.cwiseProduct(g);
    env_irradiance_backward(scene.env_sh, n, (1.0 - t.occlusion) * g_irr, lighting->env_sh);
    if (scene.illumination) {
      query_indirect_irradiance_backward(*scene.illumination, x, n, t.occlusion * g_irr,
                                         lighting->illumination);
    }
  }
  if (!t.specular) return out;
  // Specular.
  const Vec3 g_f0 = t.lut.scale * t.prefiltered.cwiseProduct(g);
  out.albedo += mat.metallic * g_f0;
  out.metallic += (mat.albedo - Vec3::Constant(0.04)).dot(g_f0);
  const Vec3 spec_factor = t.f0 * t.lut.scale + Vec3::Constant(t.lut.bias);
  const Vec3 d_factor = t.f0 * t.lut.d_scale_d_roughness + Vec3::Constant(t.lut.d_bias_d_roughness);
  out.roughness += d_factor.cwiseProduct(t.prefiltered).dot(g);
  const Vec3 g_pref = spec_factor.cwiseProduct(g);
  if (lighting) {
    out.roughness +=
        scene.prefiltered.sample_backward(t.reflected, mat.roughness, g_pref, lighting->levels).dot(g_pref);
  } else {
    std::vector<std::vector<double>> scratch(
        scene.prefiltered.levels, std::vector<double>(scene.prefiltered.images[0].size(), 0.0));
    out.roughness += scene.prefiltered.sample_backward(t.reflected, mat.roughness, g_pref, scratch)
                         .dot(g_pref);
  }
  return out;
}

Material material_of(const Gaussian& g) {
  return {albedo_of(g), roughness_of(g), metallic_of(g)};
}

namespace {

Vec3 view_direction(const Gaussian& g, const Camera& cam) {
  const Vec3 d = cam.center() - g.position;
  const double len = d.norm();
  return len > 1e-12 ? Vec3(d / len) : Vec3(Vec3::UnitZ());
}

}  // namespace

std::vector<Vec3> shade_cloud(const GaussianCloud& cloud, const Camera& cam,
                              const ShadingScene& scene) {
  std::vector<Vec3> colors(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Gaussian& g = cloud.gaussians[i];
    colors[i] = shade(material_of(g), normal_of(g), g.position, view_direction(g, cam), scene).total;
  }
  return colors;
}

void shade_cloud_backward(const GaussianCloud& cloud, const Camera& cam,
                          const ShadingScene& scene, const std::vector<Vec3>& grad_colors,
                          CloudGradient& cloud_grad, LightingGradients* lighting) {
  if (grad_colors.size() != cloud.size() || cloud_grad.size() != cloud.size()) {
    throw InvalidParameter("shade backward: gradient sizes do not match the cloud");
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (grad_colors[i].isZero(0.0)) continue;
    const Gaussian& g = cloud.gaussians[i];
    const Material mat = material_of(g);
    const MaterialGradient mg = shade_backward(mat, normal_of(g), g.position,
                                               view_direction(g, cam), scene, grad_colors[i],
                                               lighting);
    Gaussian& dg = cloud_grad[i];
    for (int c = 0; c < 3; ++c) dg.albedo_logit[c] += mg.albedo[c] * mat.albedo[c] * (1.0 - mat.albedo[c]);
    dg.roughness_logit += mg.roughness * mat.roughness * (1.0 - mat.roughness);
    dg.metallic_logit += mg.metallic * mat.metallic * (1.0 - mat.metallic);
  }
}

std::vector<double> cloud_ambient_occlusion(const GaussianCloud& cloud, const ShadingScene& scene) {
  std::vector<double> ao(cloud.size(), 0.0);
  if (!scene.occlusion) return ao;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Gaussian& g = cloud.gaussians[i];
    ao[i] = ambient_occlusion(*scene.occlusion, g.position, normal_of(g));
  }
  return ao;
}

}  // namespace splatir
