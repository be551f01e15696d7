// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/adam.hpp"
#include "splatir/brdf.hpp"
#include "splatir/dataset.hpp"
#include "splatir/environment.hpp"
#include "splatir/gaussian.hpp"
#include "splatir/geometry_losses.hpp"
#include "splatir/rasterizer.hpp"
#include "splatir/shading.hpp"
#include "splatir/volumes.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace splatir {

/// Per-group Adam learning rates (raw parameter space).
struct LearningRates {
  double position = 1e-3;
  double scale = 5e-3;
  double rotation = 2e-3;
  double opacity = 0.05;
  double sh_dc = 0.01;
  double sh_rest = 5e-4;
  double normal = 0.01;
  double albedo = 0.05;
  double roughness = 0.05;
  double metallic = 0.05;
  double environment = 0.05;
  double illumination = 0.01;
};

struct StageSchedule {
  int stage1_iterations = 2000;
  int stage3_iterations = 1500;
  double lambda_normal_tv = 0.01;
  double lambda_material = 0.01;
  double lambda_environment = 0.01;
  LearningRates lr;
  AdamHyper adam;
  std::uint64_t seed = 0;
  DepthMode depth_mode = DepthMode::kLinear;  // source of the pseudo-normals
  PenaltyNorm normal_norm = PenaltyNorm::kL1;
  bool train_illumination = true;
  RasterSettings raster;

  /// Throws InvalidParameter on negative iteration counts, weights or rates.
  void validate() const;
};

struct LossRecord {
  int stage = 1;
  int iteration = 0;
  std::string view;
  std::map<std::string, double> terms;  // always includes "total"
  double seconds = 0.0;                 // since the stage started
};

struct Stage1Result {
  GaussianCloud cloud;
  std::vector<LossRecord> history;
  std::int64_t skipped_gradients = 0;
};

struct Stage1Losses {
  double total = 0.0;
  double color = 0.0;
  double normal_penalty = 0.0;
  double normal_tv = 0.0;
};

/// Loss of one view at the current cloud; fills `upstream` when non-null.
Stage1Losses stage1_loss(const GaussianCloud& cloud, const TrainingView& view,
                         const StageSchedule& schedule, FrameGradients* upstream);

/// Fits positions, scales, rotations, normals, opacities and SH colors to the views with
/// the color loss plus the normal penalty against depth-derived pseudo-normals and normal
/// TV. Materials are not touched.
Stage1Result run_stage1(const Dataset& data, const GaussianCloud& init, const StageSchedule& schedule);

struct Stage3Inputs {
  const EnvironmentMap* env = nullptr;   // initial environment
  const BrdfLut* lut = nullptr;
  const BakedVolumes* volumes = nullptr;  // required
};

struct Stage3Result {
  GaussianCloud cloud;  // only albedo, roughness and metallic differ from the input
  EnvironmentMap env;
  VolumeGrid illumination;
  std::vector<LossRecord> history;
  std::int64_t skipped_gradients = 0;
};

struct Stage3Losses {
  double total = 0.0;
  double shade = 0.0;
  double material_tv = 0.0;
  double light_tv = 0.0;
};

/// Decomposition loss of one view; accumulates gradients when the pointers are non-null.
Stage3Losses stage3_loss(const GaussianCloud& cloud, const TrainingView& view,
                         const ShadingScene& scene, const StageSchedule& schedule,
                         CloudGradient* cloud_grad, LightingGradients* lighting,
                         std::vector<double>* env_raw_grad);

/// Optimizes materials, the environment and (optionally) the illumination volume against
/// shaded renders; geometry and appearance stay bit-identical. Throws PreconditionError
/// without baked volumes.
Stage3Result run_stage3(const Dataset& data, const GaussianCloud& cloud, const Stage3Inputs& inputs,
                        const StageSchedule& schedule);

/// Composite of the shaded Gaussians plus material channels.
FrameBuffers render_shaded(const GaussianCloud& cloud, const Camera& cam, const ShadingScene& scene,
                           const RasterSettings& settings, bool normals = false);

void write_loss_log(const std::filesystem::path& path, const std::vector<LossRecord>& records);

}  // namespace splatir
