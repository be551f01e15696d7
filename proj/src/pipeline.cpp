// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/pipeline.hpp"

#include "splatir/cameras_json.hpp"
#include "splatir/containers.hpp"
#include "splatir/dataset.hpp"
#include "splatir/errors.hpp"
#include "splatir/image_io.hpp"
#include "splatir/metrics.hpp"
#include "splatir/ply.hpp"
#include "splatir/shading.hpp"
#include "splatir/stages.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace splatir {
namespace fs = std::filesystem;

namespace {

std::string view_name(const char* split, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%03zu", split, i);
  return buf;
}

void write_config(const RunConfig& cfg) {
  fs::create_directories(cfg.output);
  std::ofstream out(fs::path(cfg.output) / "config.json");
  out << run_config_to_json(cfg);
  if (!out) throw PreconditionError("cannot write " + (fs::path(cfg.output) / "config.json").string());
}

void require_output(const RunConfig& cfg) {
  if (cfg.output.empty()) throw PreconditionError("an output directory is required");
}

fs::path require_file(const std::string& path, const char* what) {
  if (path.empty()) throw PreconditionError(std::string("missing required input: ") + what);
  if (!fs::is_regular_file(path)) {
    throw PreconditionError(std::string(what) + " not found: " + path);
  }
  return path;
}

GaussianCloud load_cloud_with_degree(const fs::path& path, int degree) {
  GaussianCloud cloud = load_gaussian_ply(path);
  if (cloud.empty()) throw PreconditionError(path.string() + ": cloud has no Gaussians");
  if (cloud.sh_degree != degree) {
    for (Gaussian& g : cloud.gaussians) {
      for (int k = sh_coeff_count(degree); k < kMaxShCoeffs; ++k) g.sh[k].setZero();
    }
    cloud.sh_degree = degree;
  }
  return cloud;
}

BrdfLut make_lut(const RunConfig& cfg) {
  return precompute_env_brdf_lut(cfg.lut_samples, cfg.lut_resolution);
}

EnvironmentMap load_environment(const fs::path& path) {
  Image radiance = load_pfm(path);
  if (radiance.channels != 3) throw ParseError(path.string() + ": environment must be RGB");
  return EnvironmentMap::from_radiance(radiance);
}

Image single_channel(const Image& src, int channel) {
  Image out(src.width, src.height, 1);
  for (std::size_t p = 0; p < src.pixel_count(); ++p) {
    out.data[p] = src.data[p * src.channels + channel];
  }
  return out;
}

Image channel_range(const Image& src, int first, int count) {
  Image out(src.width, src.height, count);
  for (std::size_t p = 0; p < src.pixel_count(); ++p) {
    for (int c = 0; c < count; ++c) out.data[p * count + c] = src.data[p * src.channels + first + c];
  }
  return out;
}

}  // namespace

fs::path resolve_transforms(const std::string& dataset, const std::string& split) {
  if (dataset.empty()) throw PreconditionError("missing required input: dataset");
  const fs::path p(dataset);
  if (fs::is_regular_file(p)) return p;
  if (fs::is_directory(p)) {
    const fs::path named = p / ("transforms_" + split + ".json");
    if (fs::is_regular_file(named)) return named;
    if (fs::is_regular_file(p / "transforms.json")) return p / "transforms.json";
  }
  throw PreconditionError("dataset not found: " + dataset);
}

void run_synth(SynthKind kind, const SynthParams& params, std::uint64_t seed,
               const fs::path& out_dir, int lut_resolution, int lut_samples, int workers) {
  const SynthScene scene = synth_scene(kind, params, seed);
  for (const char* sub : {"images", "gt_normals", "gt_depth", "gt_albedo", "gt_mask"}) {
    fs::create_directories(out_dir / sub);
  }
  const BrdfLut lut = precompute_env_brdf_lut(lut_samples, lut_resolution);
  const ShadingScene shading = make_shading_scene(scene.env, lut, nullptr, nullptr);
  RasterSettings settings;
  settings.workers = workers;

  auto write_split = [&](const char* split, const std::vector<Camera>& cams) {
    std::vector<CameraFrame> frames;
    for (std::size_t i = 0; i < cams.size(); ++i) {
      const std::string name = view_name(split, i);
      const FrameBuffers fb = render_shaded(scene.cloud, cams[i], shading, settings);
      save_png(out_dir / "images" / (name + ".png"), fb.color);
      const GroundTruthMaps gt = ground_truth_maps(scene, cams[i]);
      save_pfm(out_dir / "gt_normals" / (name + ".pfm"), gt.normal);
      save_pfm(out_dir / "gt_depth" / (name + ".pfm"), gt.depth);
      save_pfm(out_dir / "gt_albedo" / (name + ".pfm"), gt.albedo);
      Image mask(cams[i].width, cams[i].height, 1);
      for (std::size_t p = 0; p < gt.mask.size(); ++p) mask.data[p] = gt.mask[p] ? 1.0 : 0.0;
      save_png(out_dir / "gt_mask" / (name + ".png"), mask);
      frames.push_back({cams[i], "images/" + name + ".png"});
    }
    save_cameras(out_dir / (std::string("transforms_") + split + ".json"), frames);
    if (std::string(split) == "train") save_cameras(out_dir / "transforms.json", frames);
  };
  write_split("train", scene.train_cameras);
  write_split("test", scene.test_cameras);
  save_gaussian_ply(out_dir / "gt_cloud.ply", scene.cloud);
  save_gaussian_ply(out_dir / "init.ply", fitting_init(scene, seed));
  save_pfm(out_dir / "env_gt.pfm", scene.env.radiance());
}

void run_fit_geometry(const RunConfig& cfg) {
  require_output(cfg);
  const fs::path transforms = resolve_transforms(cfg.dataset, "train");
  std::string init = cfg.cloud;
  if (init.empty() && fs::is_regular_file(transforms.parent_path() / "init.ply")) {
    init = (transforms.parent_path() / "init.ply").string();
  }
  const GaussianCloud cloud = load_cloud_with_degree(require_file(init, "initial cloud"),
                                                     cfg.color_sh_degree);
  const Dataset data = load_dataset(transforms);
  write_config(cfg);
  const Stage1Result result = run_stage1(data, cloud, cfg.schedule);
  const fs::path out(cfg.output);
  save_gaussian_ply(out / "cloud.ply", result.cloud);
  write_loss_log(out / "log.jsonl", result.history);
  if (result.skipped_gradients > 0) {
    std::cerr << "warning: skipped " << result.skipped_gradients << " non-finite gradient updates\n";
  }
}

void run_bake(const RunConfig& cfg) {
  require_output(cfg);
  const GaussianCloud cloud = load_cloud_with_degree(require_file(cfg.cloud, "cloud"),
                                                     cfg.color_sh_degree);
  BakeConfig bake = default_bake_config(cloud);
  bake.dims = cfg.bake.grid;
  if (cfg.bake.tau) bake.tau = *cfg.bake.tau;
  bake.face_resolution = cfg.bake.face_resolution;
  bake.degree = cfg.bake.sh_degree;
  if (cfg.bake.bounds_min) bake.min = *cfg.bake.bounds_min;
  if (cfg.bake.bounds_max) bake.max = *cfg.bake.bounds_max;
  bake.raster = cfg.schedule.raster;
  write_config(cfg);
  const BakedVolumes volumes = bake_volumes(cloud, bake);
  save_volume(fs::path(cfg.output) / "volumes.gsirvol", combine_volumes(volumes));
}

void run_decompose(const RunConfig& cfg) {
  require_output(cfg);
  const fs::path transforms = resolve_transforms(cfg.dataset, "train");
  const GaussianCloud cloud = load_cloud_with_degree(require_file(cfg.cloud, "cloud"),
                                                     cfg.color_sh_degree);
  const BakedVolumes volumes = split_volumes(load_volume(require_file(cfg.volumes, "baked volumes")));
  const EnvironmentMap env =
      cfg.environment.empty()
          ? EnvironmentMap(cfg.env_height, cfg.env_width, inverse_softplus(cfg.env_init))
          : load_environment(require_file(cfg.environment, "environment"));
  const Dataset data = load_dataset(transforms);
  const BrdfLut lut = make_lut(cfg);
  write_config(cfg);
  const Stage3Result result = run_stage3(data, cloud, {&env, &lut, &volumes}, cfg.schedule);
  const fs::path out(cfg.output);
  save_gaussian_ply(out / "cloud.ply", result.cloud);
  save_pfm(out / "env.pfm", result.env.radiance());
  save_volume(out / "volumes.gsirvol", combine_volumes({volumes.occlusion, result.illumination}));
  write_loss_log(out / "log.jsonl", result.history);
  if (result.skipped_gradients > 0) {
    std::cerr << "warning: skipped " << result.skipped_gradients << " non-finite gradient updates\n";
  }
}

void run_render(const RunConfig& cfg, bool relight) {
  require_output(cfg);
  const fs::path transforms = resolve_transforms(cfg.dataset, "test");
  const GaussianCloud cloud = load_cloud_with_degree(require_file(cfg.cloud, "cloud"),
                                                     cfg.color_sh_degree);
  if (relight && cfg.environment.empty()) {
    throw PreconditionError("relight requires an environment map");
  }
  std::optional<BakedVolumes> volumes;
  if (!cfg.volumes.empty()) volumes = split_volumes(load_volume(require_file(cfg.volumes, "baked volumes")));
  std::optional<EnvironmentMap> env;
  if (!cfg.environment.empty()) env = load_environment(require_file(cfg.environment, "environment"));
  const std::vector<CameraFrame> frames = load_cameras(transforms);

  std::vector<std::string> channels;
  for (const std::string& c : cfg.render.channels) {
    if (c == "ao" && !volumes) {
      std::cerr << "note: skipping the ao channel (no baked volumes given)\n";
      continue;
    }
    channels.push_back(c);
  }
  auto wants = [&](const char* c) {
    return std::find(channels.begin(), channels.end(), c) != channels.end();
  };

  std::optional<BrdfLut> lut;
  std::optional<ShadingScene> scene;
  // Shading also needs an environment; without one, AO is the only consumer of a scene.
  if (env || wants("ao")) {
    lut = make_lut(cfg);
    static const EnvironmentMap kFlat(2, 4, inverse_softplus(1.0));
    scene = make_shading_scene(env ? *env : kFlat, *lut, volumes ? &volumes->occlusion : nullptr,
                               volumes ? &volumes->illumination : nullptr);
  }
  std::vector<double> ao;
  if (wants("ao")) ao = cloud_ambient_occlusion(cloud, *scene);

  std::vector<std::size_t> views;
  if (cfg.render.views.empty()) {
    for (std::size_t i = 0; i < frames.size(); ++i) views.push_back(i);
  } else {
    for (const int v : cfg.render.views) {
      if (v < 0 || static_cast<std::size_t>(v) >= frames.size()) {
        throw PreconditionError("view index " + std::to_string(v) + " out of range");
      }
      views.push_back(static_cast<std::size_t>(v));
    }
  }

  write_config(cfg);
  const fs::path dir = fs::path(cfg.output) / "renders";
  fs::create_directories(dir);
  const RasterSettings& settings = cfg.schedule.raster;
  for (const std::size_t i : views) {
    const Camera& cam = frames[i].camera;
    const std::string name = fs::path(frames[i].file_path).stem().string();
    std::vector<Vec3> colors;
    RenderInputs in;
    if (env) {
      colors = shade_cloud(cloud, cam, *scene);
      in.colors = colors;
    }
    if (!ao.empty()) {
      in.extra = ao;
      in.extra_channels = 1;
    }
    const FrameBuffers fb = rasterize_forward(cloud, cam, {.normal = wants("normal"), .material = true},
                                              settings, in);
    const auto path = [&](const char* channel, const char* ext) {
      return dir / (name + "_" + channel + ext);
    };
    if (wants("color")) save_png(path("color", ".png"), fb.color);
    if (wants("alpha")) save_png(path("alpha", ".png"), fb.alpha);
    if (wants("depth")) save_pfm(path("depth", ".pfm"), fb.depth(cfg.render.depth_mode));
    if (wants("normal")) save_pfm(path("normal", ".pfm"), fb.normal);
    if (wants("albedo")) save_png(path("albedo", ".png"), channel_range(fb.features, 0, 3));
    if (wants("roughness")) save_png(path("roughness", ".png"), single_channel(fb.features, 3));
    if (wants("metallic")) save_png(path("metallic", ".png"), single_channel(fb.features, 4));
    if (wants("ao")) save_png(path("ao", ".png"), single_channel(fb.features, kMaterialChannels));
  }
}

std::string run_eval(const EvalRequest& req) {
  nlohmann::ordered_json out;
  if (!req.image.empty() || !req.target.empty()) {
    const auto load_any = [](const std::string& p) {
      require_file(p, "image");
      return fs::path(p).extension() == ".pfm" ? load_pfm(p) : load_png(p);
    };
    const Image a = load_any(req.image);
    const Image b = load_any(req.target);
    if (!a.same_shape(b)) throw PreconditionError("eval: image and target differ in shape");
    out["psnr"] = metric_psnr(a, b);
    out["ssim"] = metric_ssim(a, b);
    return out.dump(2);
  }
  if (req.renders.empty() || req.dataset.empty()) {
    throw PreconditionError("eval needs --renders and --dataset, or --image and --target");
  }
  const fs::path transforms = resolve_transforms(req.dataset, req.split);
  const fs::path root = transforms.parent_path();
  const fs::path renders(req.renders);
  double sum_psnr = 0.0, sum_ssim = 0.0, sum_mae = 0.0, sum_albedo = 0.0;
  int n_color = 0, n_normal = 0, n_albedo = 0;
  nlohmann::ordered_json per_view = nlohmann::ordered_json::object();
  for (const CameraFrame& frame : load_cameras(transforms)) {
    const std::string name = fs::path(frame.file_path).stem().string();
    nlohmann::ordered_json v = nlohmann::ordered_json::object();
    const fs::path color = renders / (name + "_color.png");
    if (fs::is_regular_file(color)) {
      Image target = load_png(frame_image_path(transforms, frame.file_path));
      if (target.channels != 3) target = channel_range(target, 0, 3);
      const Image pred = load_png(color);
      if (!pred.same_shape(target)) throw PreconditionError(color.string() + ": shape mismatch");
      v["psnr"] = metric_psnr(pred, target);
      v["ssim"] = metric_ssim(pred, target);
      sum_psnr += v["psnr"].get<double>();
      sum_ssim += v["ssim"].get<double>();
      ++n_color;
    }
    const fs::path mask_path = root / "gt_mask" / (name + ".png");
    Mask mask;
    if (fs::is_regular_file(mask_path)) {
      const Image m = load_png(mask_path);
      mask.resize(m.pixel_count());
      for (std::size_t p = 0; p < mask.size(); ++p) mask[p] = m.data[p * m.channels] > 0.5;
    }
    const fs::path normal = renders / (name + "_normal.pfm");
    const fs::path gt_normal = root / "gt_normals" / (name + ".pfm");
    if (fs::is_regular_file(normal) && fs::is_regular_file(gt_normal) && !mask.empty()) {
      v["normal_mae_deg"] = metric_normal_mae(load_pfm(normal), load_pfm(gt_normal), mask);
      sum_mae += v["normal_mae_deg"].get<double>();
      ++n_normal;
    }
    const fs::path albedo = renders / (name + "_albedo.png");
    const fs::path gt_albedo = root / "gt_albedo" / (name + ".pfm");
    if (fs::is_regular_file(albedo) && fs::is_regular_file(gt_albedo) && !mask.empty()) {
      const Image pred = load_png(albedo);
      const Image gt = load_pfm(gt_albedo);
      const Vec3 s = per_channel_scale(pred, gt, mask);
      v["albedo_psnr"] = metric_psnr(scaled(pred, s), gt, mask);
      sum_albedo += v["albedo_psnr"].get<double>();
      ++n_albedo;
    }
    per_view[name] = v;
  }
  nlohmann::ordered_json mean = nlohmann::ordered_json::object();
  if (n_color) {
    mean["psnr"] = sum_psnr / n_color;
    mean["ssim"] = sum_ssim / n_color;
  }
  if (n_normal) mean["normal_mae_deg"] = sum_mae / n_normal;
  if (n_albedo) mean["albedo_psnr"] = sum_albedo / n_albedo;
  out["mean"] = mean;
  out["views"] = per_view;
  return out.dump(2);
}

}  // namespace splatir
