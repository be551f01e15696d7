// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/camera.hpp"
#include "splatir/gaussian.hpp"

#include <span>

namespace splatir::oracle {

/// The brute-force path is meant for small scenes only.
inline constexpr std::size_t kMaxOracleGaussians = 64;

struct CompositeOptions {
  Vec3 background = Vec3::Zero();
  double min_alpha = 1.0 / 255.0;
  /// 0 disables the early exit (the default: every contributor is visited).
  double transmittance_cutoff = 0.0;
  double coverage_threshold = 1e-6;
};

struct CompositePixel {
  Vec3 color = Vec3::Zero();
  double alpha = 0.0;
  bool covered = false;
  // Far plane where not covered.
  double depth_vol = 0.0;
  double depth_peak = 0.0;
  double depth_linear = 0.0;
  Vec3 normal_accum = Vec3::Zero();
  int contributors = 0;
};

/// Brute-force evaluation of one pixel: every Gaussian is projected in long double,
/// the whole list is sorted by (depth, index) and composited without tiling.
/// `colors` gives one RGB per Gaussian; normals are the raw normal fields, normalized.
CompositePixel oracle_composite(const GaussianCloud& cloud, const Camera& cam, int px, int py,
                                std::span<const Vec3> colors, const CompositeOptions& opts = {});

}  // namespace splatir::oracle
