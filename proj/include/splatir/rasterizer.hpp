// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/camera.hpp"
#include "splatir/gaussian.hpp"
#include "splatir/image.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace splatir {

/// How per-pixel depth is derived from the sorted contributors.
enum class DepthMode {
  kVolumeAccumulated,  // sum_i T_i a_i d_i
  kPeak,               // d of the contributor with the largest T_i a_i
  kLinear,             // sum_i w_i d_i with w normalized to sum to one
};

std::string_view to_string(DepthMode mode);
/// Accepts "vol_accum", "peak" and "linear"; throws InvalidParameter otherwise.
DepthMode parse_depth_mode(std::string_view name);

struct RasterSettings {
  Vec3 background = Vec3::Zero();
  int tile_size = 16;
  /// A splat is skipped at a pixel when its g * opacity falls below this.
  double min_alpha = 1.0 / 255.0;
  /// Compositing stops once transmittance drops below this.
  double transmittance_cutoff = 1e-4;
  /// Pixels whose summed weight is below this have undefined depth and normal.
  double coverage_threshold = 1e-6;
  /// 0 = default_worker_count().
  int workers = 0;
};

struct ChannelSelection {
  bool normal = false;
  bool material = false;  // albedo (3), roughness, metallic
};

inline constexpr int kMaterialChannels = 5;

/// Optional per-Gaussian values supplied by the caller instead of derived from the cloud.
struct RenderInputs {
  /// Replaces the SH color when non-empty; one entry per Gaussian.
  std::span<const Vec3> colors;
  /// Extra composited channels, Gaussian-major (N * extra_channels).
  std::span<const double> extra;
  int extra_channels = 0;
};

struct FrameBuffers {
  Image color;         // 3 channels, includes background * final transmittance
  Image alpha;         // sum of blending weights
  Image depth_vol;     // far plane where not covered
  Image depth_peak;
  Image depth_linear;
  Mask coverage;       // summed weight >= coverage threshold
  Image normal;        // renormalized composite; zero where not covered
  Image normal_accum;  // raw sum of weight * unit normal
  Image features;      // material channels (if selected) followed by extra channels
  std::vector<int> contributors;
  std::vector<int> peak_gaussian;  // source of depth_peak; -1 without contributors

  const Image& depth(DepthMode mode) const;
};

/// One visible splat after projection. Records are ordered by depth, ties broken by
/// Gaussian index.
struct SplatRecord {
  int gaussian = 0;
  Vec2 mean = Vec2::Zero();
  double conic_a = 0.0, conic_b = 0.0, conic_c = 0.0;  // inverse screen covariance
  double opacity = 0.0;
  double depth = 0.0;
  int px_min = 0, px_max = -1, py_min = 0, py_max = -1;  // inclusive pixel bounds
};

struct SplatList {
  std::vector<SplatRecord> records;
  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::vector<int>> tile_lists;  // record indices, sorted front to back
};

/// Projects, culls, sorts and bins the cloud. A splat's pixel bounds are the bounding
/// box of the ellipse outside which g * opacity < min_alpha, so tiling never drops a
/// contribution that compositing would keep.
SplatList build_splat_list(const GaussianCloud& cloud, const Camera& cam,
                           const RasterSettings& settings);

/// Front-to-back splatting of colors, depth (all modes), normals and feature channels.
FrameBuffers rasterize_forward(const GaussianCloud& cloud, const Camera& cam,
                               const ChannelSelection& channels,
                               const RasterSettings& settings = {},
                               const RenderInputs& inputs = {});

/// Depth image for one mode.
Image render_depth(const GaussianCloud& cloud, const Camera& cam, DepthMode mode,
                   const RasterSettings& settings = {});

/// dL/d(buffer) for each forward output; leave a member empty when it does not enter the loss.
struct FrameGradients {
  Image color;
  Image alpha;
  Image depth_vol;
  Image depth_peak;
  Image depth_linear;
  Image normal_accum;
  Image features;
};

struct RasterGradients {
  CloudGradient cloud;      // raw-parameter gradients
  std::vector<Vec3> colors;  // dL/d(per-Gaussian color), whichever source produced it
  std::vector<double> extra;
};

/// Analytic gradients of the forward outputs. Per-pixel blending is recomputed, then
/// walked back to front; tile contributions are reduced in tile order, so the result
/// does not depend on the worker count.
RasterGradients rasterize_backward(const GaussianCloud& cloud, const Camera& cam,
                                   const ChannelSelection& channels,
                                   const FrameGradients& upstream,
                                   const RasterSettings& settings = {},
                                   const RenderInputs& inputs = {});

}  // namespace splatir
