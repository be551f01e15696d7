// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/stages.hpp"

#include "splatir/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>

namespace splatir {

void StageSchedule::validate() const {
  if (stage1_iterations < 0 || stage3_iterations < 0) {
    throw InvalidParameter("iteration counts must be non-negative");
  }
  if (lambda_normal_tv < 0.0 || lambda_material < 0.0 || lambda_environment < 0.0) {
    throw InvalidParameter("loss weights must be non-negative");
  }
  for (double v : {lr.position, lr.scale, lr.rotation, lr.opacity, lr.sh_dc, lr.sh_rest, lr.normal,
                   lr.albedo, lr.roughness, lr.metallic, lr.environment, lr.illumination}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidParameter("learning rates must be >= 0");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
      !(adam.epsilon > 0.0)) {
    throw InvalidParameter("Adam betas must be in [0, 1) and epsilon positive");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

/// A contiguous run of raw parameters inside each Gaussian.
struct Field {
  const char* group;
  int width;
  std::function<double*(Gaussian&)> data;
};

std::vector<Field> geometry_fields(int sh_degree) {
  std::vector<Field> f = {
      {"position", 3, [](Gaussian& g) { return g.position.data(); }},
      {"scale", 3, [](Gaussian& g) { return g.log_scale.data(); }},
      {"rotation", 4, [](Gaussian& g) { return g.rotation.data(); }},
      {"normal", 3, [](Gaussian& g) { return g.normal.data(); }},
      {"opacity", 1, [](Gaussian& g) { return &g.opacity_logit; }},
      {"sh_dc", 3, [](Gaussian& g) { return g.sh[0].data(); }},
  };
  const int rest = sh_coeff_count(sh_degree) - 1;
  if (rest > 0) f.push_back({"sh_rest", 3 * rest, [](Gaussian& g) { return g.sh[1].data(); }});
  return f;
}

std::vector<Field> material_fields() {
  return {
      {"albedo", 3, [](Gaussian& g) { return g.albedo_logit.data(); }},
      {"roughness", 1, [](Gaussian& g) { return &g.roughness_logit; }},
      {"metallic", 1, [](Gaussian& g) { return &g.metallic_logit; }},
  };
}

double field_lr(const LearningRates& lr, const std::string& group) {
  if (group == "position") return lr.position;
  if (group == "scale") return lr.scale;
  if (group == "rotation") return lr.rotation;
  if (group == "normal") return lr.normal;
  if (group == "opacity") return lr.opacity;
  if (group == "sh_dc") return lr.sh_dc;
  if (group == "sh_rest") return lr.sh_rest;
  if (group == "albedo") return lr.albedo;
  if (group == "roughness") return lr.roughness;
  if (group == "metallic") return lr.metallic;
  throw InvalidParameter("unknown parameter group " + group);
}

void apply_fields(Adam& adam, const std::vector<Field>& fields, GaussianCloud& cloud,
                  CloudGradient& grad, const LearningRates& lr) {
  const std::size_t n = cloud.size();
  std::vector<double> params, grads;
  for (const Field& f : fields) {
    params.resize(n * f.width);
    grads.resize(n * f.width);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(f.data(cloud.gaussians[i]), f.width, params.begin() + i * f.width);
      std::copy_n(f.data(grad[i]), f.width, grads.begin() + i * f.width);
    }
    adam.update(f.group, params, grads, field_lr(lr, f.group));
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(params.begin() + i * f.width, f.width, f.data(cloud.gaussians[i]));
    }
  }
}

void renormalize(GaussianCloud& cloud) {
  for (Gaussian& g : cloud.gaussians) {
    const double q = g.rotation.norm();
    if (q > 0.0) g.rotation /= q;
    const double n = g.normal.norm();
    if (n > 0.0) g.normal /= n;
  }
}

/// Seeded view order, reshuffled every pass over the data.
class ViewCycle {
 public:
  ViewCycle(std::size_t count, std::uint64_t seed) : order_(count), rng_(seed) {
    std::iota(order_.begin(), order_.end(), 0);
  }
  std::size_t next() {
    if (pos_ == 0) std::shuffle(order_.begin(), order_.end(), rng_);
    const std::size_t v = order_[pos_];
    pos_ = (pos_ + 1) % order_.size();
    return v;
  }

 private:
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  std::size_t pos_ = 0;
};

class NonFiniteGuard {
 public:
  /// Returns false when the loss should not be applied; throws on the second in a row.
  bool accept(double total, int stage, int iteration) {
    if (std::isfinite(total)) {
      streak_ = 0;
      return true;
    }
    if (++streak_ >= 2) {
      throw std::runtime_error("stage " + std::to_string(stage) +
                               ": total loss non-finite twice in a row at iteration " +
                               std::to_string(iteration));
    }
    return false;
  }

 private:
  int streak_ = 0;
};

void check_dataset(const Dataset& data) {
  if (data.views.empty()) throw InvalidParameter("dataset has no views");
  for (const TrainingView& v : data.views) {
    v.camera.validate();
    if (v.target.width != v.camera.width || v.target.height != v.camera.height ||
        v.target.channels != 3) {
      throw InvalidParameter("view " + v.name + ": target does not match its camera");
    }
  }
}

}  // namespace

Stage1Losses stage1_loss(const GaussianCloud& cloud, const TrainingView& view,
                         const StageSchedule& schedule, FrameGradients* upstream) {
  const Camera& cam = view.camera;
  const FrameBuffers fb = rasterize_forward(cloud, cam, {.normal = true}, schedule.raster);
  Stage1Losses L;
  Image g_color;
  L.color = loss_color(fb.color, view.target, upstream ? &g_color : nullptr);

  const Image pseudo =
      camera_to_world_normals(depth_to_pseudo_normal(fb.depth(schedule.depth_mode), fb.coverage, cam), cam);
  Image g_penalty;
  L.normal_penalty = loss_normal_penalty(fb.normal, pseudo, fb.coverage, schedule.normal_norm,
                                         upstream ? &g_penalty : nullptr);
  const std::size_t covered = mask_count(fb.coverage);
  Image g_tv;
  if (covered > 0) {
    L.normal_tv = loss_tv(fb.normal, fb.coverage, upstream ? &g_tv : nullptr) / covered;
  }
  L.total = L.color + L.normal_penalty + schedule.lambda_normal_tv * L.normal_tv;

  if (upstream) {
    Image g_normal = g_penalty;
    if (covered > 0) {
      const double w = schedule.lambda_normal_tv / static_cast<double>(covered);
      for (std::size_t i = 0; i < g_normal.data.size(); ++i) g_normal.data[i] += w * g_tv.data[i];
    }
    *upstream = FrameGradients{};
    upstream->color = std::move(g_color);
    upstream->normal_accum = normalize_image_backward(fb.normal_accum, g_normal);
  }
  return L;
}

Stage1Result run_stage1(const Dataset& data, const GaussianCloud& init, const StageSchedule& schedule) {
  check_dataset(data);
  schedule.validate();
  if (init.empty()) throw InvalidParameter("stage 1: initial cloud is empty");
  Stage1Result result;
  result.cloud = init;
  GaussianCloud& cloud = result.cloud;
  Adam adam(schedule.adam);
  ViewCycle views(data.views.size(), schedule.seed);
  NonFiniteGuard guard;
  const auto fields = geometry_fields(cloud.sh_degree);
  const auto start = Clock::now();

  for (int it = 0; it < schedule.stage1_iterations; ++it) {
    const TrainingView& view = data.views[views.next()];
    FrameGradients up;
    const Stage1Losses L = stage1_loss(cloud, view, schedule, &up);
    LossRecord rec;
    rec.stage = 1;
    rec.iteration = it;
    rec.view = view.name;
    rec.terms = {{"total", L.total},
                 {"color", L.color},
                 {"normal_penalty", L.normal_penalty},
                 {"normal_tv", L.normal_tv}};
    rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.history.push_back(rec);
    if (!guard.accept(L.total, 1, it)) continue;

    RasterGradients g = rasterize_backward(cloud, view.camera, {.normal = true}, up, schedule.raster);
    adam.begin_step();
    apply_fields(adam, fields, cloud, g.cloud, schedule.lr);
    renormalize(cloud);
  }
  result.skipped_gradients = adam.skipped();
  return result;
}

FrameBuffers render_shaded(const GaussianCloud& cloud, const Camera& cam, const ShadingScene& scene,
                           const RasterSettings& settings, bool normals) {
  const std::vector<Vec3> colors = shade_cloud(cloud, cam, scene);
  RenderInputs in;
  in.colors = colors;
  return rasterize_forward(cloud, cam, {.normal = normals, .material = true}, settings, in);
}

Stage3Losses stage3_loss(const GaussianCloud& cloud, const TrainingView& view,
                         const ShadingScene& scene, const StageSchedule& schedule,
                         CloudGradient* cloud_grad, LightingGradients* lighting,
                         std::vector<double>* env_raw_grad) {
  const Camera& cam = view.camera;
  const std::vector<Vec3> colors = shade_cloud(cloud, cam, scene);
  RenderInputs in;
  in.colors = colors;
  const ChannelSelection channels{.normal = false, .material = true};
  const FrameBuffers fb = rasterize_forward(cloud, cam, channels, schedule.raster, in);

  Stage3Losses L;
  const bool grads = cloud_grad != nullptr;
  const double n_values = static_cast<double>(fb.color.data.size());
  Image g_color(fb.color.width, fb.color.height, 3);
  for (std::size_t i = 0; i < fb.color.data.size(); ++i) {
    const double d = fb.color.data[i] - view.target.data[i];
    L.shade += std::abs(d);
    g_color.data[i] = ((d > 0.0) - (d < 0.0)) / n_values;
  }
  L.shade /= n_values;

  const std::size_t covered = mask_count(fb.coverage);
  Image g_material;
  if (covered > 0) {
    L.material_tv = loss_tv(fb.features, fb.coverage, grads ? &g_material : nullptr) / covered;
  }
  const Image env_radiance = scene.env->radiance();
  Image g_env;
  L.light_tv = loss_tv(env_radiance, {}, grads ? &g_env : nullptr) /
               static_cast<double>(env_radiance.pixel_count());
  L.total = L.shade + schedule.lambda_material * L.material_tv +
            schedule.lambda_environment * L.light_tv;
  if (!grads) return L;

  FrameGradients up;
  up.color = std::move(g_color);
  if (covered > 0) {
    const double w = schedule.lambda_material / static_cast<double>(covered);
    for (double& v : g_material.data) v *= w;
    up.features = std::move(g_material);
  }
  RasterGradients rg = rasterize_backward(cloud, cam, channels, up, schedule.raster, in);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Gaussian& dst = (*cloud_grad)[i];
    const Gaussian& src = rg.cloud[i];
    dst.albedo_logit += src.albedo_logit;
    dst.roughness_logit += src.roughness_logit;
    dst.metallic_logit += src.metallic_logit;
  }
  shade_cloud_backward(cloud, cam, scene, rg.colors, *cloud_grad, lighting);
  if (env_raw_grad) {
    const double w = schedule.lambda_environment / static_cast<double>(env_radiance.pixel_count());
    env_raw_grad->assign(scene.env->raw.size(), 0.0);
    for (std::size_t i = 0; i < env_raw_grad->size(); ++i) {
      (*env_raw_grad)[i] = w * g_env.data[i] * sigmoid(scene.env->raw[i]);
    }
  }
  return L;
}

Stage3Result run_stage3(const Dataset& data, const GaussianCloud& cloud, const Stage3Inputs& inputs,
                        const StageSchedule& schedule) {
  if (!inputs.volumes) throw PreconditionError("stage 3 needs baked volumes");
  if (!inputs.env || !inputs.lut) throw PreconditionError("stage 3 needs an environment and BRDF table");
  check_dataset(data);
  schedule.validate();
  Stage3Result result;
  result.cloud = cloud;
  result.env = *inputs.env;
  result.illumination = inputs.volumes->illumination;
  GaussianCloud& work = result.cloud;

  ShadingScene scene = make_shading_scene(result.env, *inputs.lut, &inputs.volumes->occlusion,
                                          &result.illumination);
  Adam adam(schedule.adam);
  ViewCycle views(data.views.size(), schedule.seed);
  NonFiniteGuard guard;
  const auto fields = material_fields();
  const auto start = Clock::now();

  for (int it = 0; it < schedule.stage3_iterations; ++it) {
    const TrainingView& view = data.views[views.next()];
    CloudGradient g = zero_gradient(work.size());
    LightingGradients lighting(scene);
    std::vector<double> env_grad;
    const Stage3Losses L = stage3_loss(work, view, scene, schedule, &g, &lighting, &env_grad);
    LossRecord rec;
    rec.stage = 3;
    rec.iteration = it;
    rec.view = view.name;
    rec.terms = {{"total", L.total},
                 {"shade", L.shade},
                 {"material_tv", L.material_tv},
                 {"light_tv", L.light_tv}};
    rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.history.push_back(rec);
    if (!guard.accept(L.total, 3, it)) continue;

    adam.begin_step();
    apply_fields(adam, fields, work, g, schedule.lr);
    const std::vector<double> env_shade_grad = lighting.env_raw_gradient(scene);
    for (std::size_t i = 0; i < env_grad.size(); ++i) env_grad[i] += env_shade_grad[i];
    adam.update("environment", result.env.raw, env_grad, schedule.lr.environment);
    if (schedule.train_illumination) {
      adam.update("illumination", result.illumination.coeffs, lighting.illumination,
                  schedule.lr.illumination);
    }
    refresh_lighting(scene);
  }
  result.skipped_gradients = adam.skipped();
  return result;
}

void write_loss_log(const std::filesystem::path& path, const std::vector<LossRecord>& records) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw PreconditionError("cannot write " + path.string());
  for (const LossRecord& r : records) {
    nlohmann::ordered_json j;
    j["stage"] = r.stage;
    j["iteration"] = r.iteration;
    j["view"] = r.view;
    for (const auto& [k, v] : r.terms) {
      if (std::isfinite(v)) {
        j[k] = v;
      } else {
        j[k] = nullptr;
      }
    }
    j["seconds"] = r.seconds;
    out << j.dump() << "\n";
  }
}

}  // namespace splatir
