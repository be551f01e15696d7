// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/gaussian.hpp"
#include "splatir/rasterizer.hpp"

#include <array>
#include <span>
#include <vector>

namespace splatir {

/// Regular grid of SH probes. Probe (i, j, k) sits at min + (i, j, k) * (max - min) / (dims - 1).
/// Coefficients are stored probe by probe (x fastest), each block channel-major.
struct VolumeGrid {
  std::array<int, 3> dims{2, 2, 2};
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Ones();
  int degree = 2;
  int channels = 1;
  std::vector<double> coeffs;

  VolumeGrid() = default;
  VolumeGrid(std::array<int, 3> dims, const Vec3& min, const Vec3& max, int degree, int channels);

  int coeff_count() const { return sh_coeff_count(degree); }
  int block_size() const { return channels * coeff_count(); }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t cell_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  Vec3 cell_position(int i, int j, int k) const;
  double* block(std::size_t cell) { return coeffs.data() + cell * block_size(); }
  const double* block(std::size_t cell) const { return coeffs.data() + cell * block_size(); }

  /// Throws InvalidParameter on bad dims/bounds/degree or a coefficient-size mismatch.
  void validate() const;
};

struct BakeConfig {
  std::array<int, 3> dims{16, 16, 16};
  Vec3 min = -Vec3::Ones();
  Vec3 max = Vec3::Ones();
  double tau = 0.1;
  int face_resolution = 64;
  int degree = 2;
  double near = 0.01;
  double far = 100.0;
  RasterSettings raster;  // background and worker count also apply to the bake
};

/// Bounding box of the Gaussian centers inflated by 5% per side, tau = 0.1 * its diagonal.
BakeConfig default_bake_config(const GaussianCloud& cloud);

struct BakedVolumes {
  VolumeGrid occlusion;     // 1 channel
  VolumeGrid illumination;  // RGB
};

/// Renders six faces per probe, thresholds depth into binary occlusion and projects both
/// occlusion and radiance onto SH. Probes are independent and processed in parallel.
BakedVolumes bake_volumes(const GaussianCloud& cloud, const BakeConfig& config);

/// Packs occlusion (channel 0) and illumination (channels 1-3) into one grid and back.
VolumeGrid combine_volumes(const BakedVolumes& volumes);
BakedVolumes split_volumes(const VolumeGrid& combined);

struct ProbeWeights {
  std::array<std::size_t, 8> cells{};
  std::array<double, 8> weights{};
};

/// Plain trilinear weights of the 8 probes around x (x clamped to the grid).
ProbeWeights trilinear_weights(const VolumeGrid& grid, const Vec3& x);

/// Trilinear weights with probes on or behind the tangent plane at x removed and the rest
/// renormalized. Falls back to plain trilinear when every probe is removed.
ProbeWeights masked_trilinear_weights(const VolumeGrid& grid, const Vec3& x, const Vec3& n);

/// Weighted sum of probe coefficient blocks.
std::vector<double> interpolate_block(const VolumeGrid& grid, const ProbeWeights& w);

/// Occlusion in direction `dir` seen from x with surface normal n, clamped to [0, 1].
double query_occlusion(const VolumeGrid& grid, const Vec3& x, const Vec3& n, const Vec3& dir);

/// Cosine-weighted hemisphere average of occlusion about n, clamped to [0, 1].
double ambient_occlusion(const VolumeGrid& grid, const Vec3& x, const Vec3& n);

/// Irradiance about n from the plainly interpolated radiance SH, clamped at 0.
Vec3 query_indirect_irradiance(const VolumeGrid& grid, const Vec3& x, const Vec3& n);

/// Adds d(irradiance)/d(coefficients) * grad_out into grad_coeffs (same layout as coeffs).
void query_indirect_irradiance_backward(const VolumeGrid& grid, const Vec3& x, const Vec3& n,
                                        const Vec3& grad_out, std::span<double> grad_coeffs);

}  // namespace splatir
