// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/volumes.hpp"

#include "splatir/cubemap.hpp"
#include "splatir/errors.hpp"
#include "splatir/parallel.hpp"
#include "splatir/sh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace splatir {

VolumeGrid::VolumeGrid(std::array<int, 3> d, const Vec3& lo, const Vec3& hi, int deg, int ch)
    : dims(d), min(lo), max(hi), degree(deg), channels(ch) {
  if (d[0] < 2 || d[1] < 2 || d[2] < 2) throw InvalidParameter("volume dims must be >= 2");
  if (deg < 0 || deg > kMaxShDegree) throw InvalidParameter("volume SH degree must be in [0, 3]");
  if (ch < 1) throw InvalidParameter("volume needs at least one channel");
  coeffs.assign(cell_count() * block_size(), 0.0);
}

Vec3 VolumeGrid::cell_position(int i, int j, int k) const {
  const Vec3 step = (max - min).cwiseQuotient(Vec3(dims[0] - 1, dims[1] - 1, dims[2] - 1));
  return min + Vec3(i, j, k).cwiseProduct(step);
}

void VolumeGrid::validate() const {
  if (dims[0] < 2 || dims[1] < 2 || dims[2] < 2) throw InvalidParameter("volume dims must be >= 2");
  if (degree < 0 || degree > kMaxShDegree) throw InvalidParameter("volume SH degree must be in [0, 3]");
  if (channels < 1) throw InvalidParameter("volume needs at least one channel");
  if (!min.allFinite() || !max.allFinite() || !((max - min).minCoeff() > 0.0)) {
    throw InvalidParameter("volume bounds must be finite with max > min");
  }
  if (coeffs.size() != cell_count() * block_size()) {
    throw InvalidParameter("volume coefficient count does not match its shape");
  }
}

BakeConfig default_bake_config(const GaussianCloud& cloud) {
  BakeConfig cfg;
  if (cloud.empty()) return cfg;
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Gaussian& g : cloud.gaussians) {
    lo = lo.cwiseMin(g.position);
    hi = hi.cwiseMax(g.position);
  }
  Vec3 pad = 0.05 * (hi - lo);
  pad = pad.cwiseMax(1e-3);
  cfg.min = lo - pad;
  cfg.max = hi + pad;
  cfg.tau = 0.1 * (cfg.max - cfg.min).norm();
  return cfg;
}

BakedVolumes bake_volumes(const GaussianCloud& cloud, const BakeConfig& cfg) {
  BakedVolumes out{VolumeGrid(cfg.dims, cfg.min, cfg.max, cfg.degree, 1),
                   VolumeGrid(cfg.dims, cfg.min, cfg.max, cfg.degree, 3)};
  out.occlusion.validate();
  if (!(cfg.tau > 0.0)) throw InvalidParameter("bake: tau must be positive");
  const int n = sh_coeff_count(cfg.degree);
  RasterSettings inner = cfg.raster;
  inner.workers = 1;  // parallel over probes instead
  const int workers = cfg.raster.workers > 0 ? cfg.raster.workers : default_worker_count();
  parallel_for(out.occlusion.cell_count(), workers, [&](std::size_t cell) {
    const int i = static_cast<int>(cell % cfg.dims[0]);
    const int j = static_cast<int>((cell / cfg.dims[0]) % cfg.dims[1]);
    const int k = static_cast<int>(cell / (static_cast<std::size_t>(cfg.dims[0]) * cfg.dims[1]));
    const Vec3 center = out.occlusion.cell_position(i, j, k);
    const CellCubemaps cms =
        render_cell_cubemaps(cloud, center, cfg.face_resolution, inner, cfg.near, cfg.far);
    const auto occ = sh_project_cubemap(occlusion_from_depth(cms.depth, cfg.tau), cfg.degree);
    const auto rad = sh_project_cubemap(cms.radiance, cfg.degree);
    std::copy(occ.begin(), occ.end(), out.occlusion.block(cell));
    std::copy(rad.begin(), rad.begin() + 3 * n, out.illumination.block(cell));
  });
  return out;
}

VolumeGrid combine_volumes(const BakedVolumes& v) {
  v.occlusion.validate();
  v.illumination.validate();
  if (v.occlusion.dims != v.illumination.dims || v.occlusion.degree != v.illumination.degree ||
      v.occlusion.channels != 1 || v.illumination.channels != 3 ||
      v.occlusion.min != v.illumination.min || v.occlusion.max != v.illumination.max) {
    throw InvalidParameter("occlusion and illumination grids do not share a layout");
  }
  VolumeGrid out(v.occlusion.dims, v.occlusion.min, v.occlusion.max, v.occlusion.degree, 4);
  const int n = out.coeff_count();
  for (std::size_t cell = 0; cell < out.cell_count(); ++cell) {
    std::copy_n(v.occlusion.block(cell), n, out.block(cell));
    std::copy_n(v.illumination.block(cell), 3 * n, out.block(cell) + n);
  }
  return out;
}

BakedVolumes split_volumes(const VolumeGrid& g) {
  g.validate();
  if (g.channels != 4) throw InvalidParameter("volume file must hold 4 channels");
  BakedVolumes out{VolumeGrid(g.dims, g.min, g.max, g.degree, 1),
                   VolumeGrid(g.dims, g.min, g.max, g.degree, 3)};
  const int n = g.coeff_count();
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    std::copy_n(g.block(cell), n, out.occlusion.block(cell));
    std::copy_n(g.block(cell) + n, 3 * n, out.illumination.block(cell));
  }
  return out;
}

ProbeWeights trilinear_weights(const VolumeGrid& grid, const Vec3& x) {
  std::array<int, 3> i0{};
  std::array<double, 3> f{};
  for (int a = 0; a < 3; ++a) {
    const double t = (x[a] - grid.min[a]) / (grid.max[a] - grid.min[a]) * (grid.dims[a] - 1);
    i0[a] = std::clamp(static_cast<int>(std::floor(t)), 0, grid.dims[a] - 2);
    f[a] = std::clamp(t - i0[a], 0.0, 1.0);
  }
  ProbeWeights w;
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    w.cells[c] = grid.cell_index(i0[0] + dx, i0[1] + dy, i0[2] + dz);
    w.weights[c] = (dx ? f[0] : 1.0 - f[0]) * (dy ? f[1] : 1.0 - f[1]) * (dz ? f[2] : 1.0 - f[2]);
  }
  return w;
}

ProbeWeights masked_trilinear_weights(const VolumeGrid& grid, const Vec3& x, const Vec3& n) {
  const ProbeWeights plain = trilinear_weights(grid, x);
  ProbeWeights masked = plain;
  double sum = 0.0;
  for (int c = 0; c < 8; ++c) {
    const std::size_t cell = plain.cells[c];
    const int i = static_cast<int>(cell % grid.dims[0]);
    const int j = static_cast<int>((cell / grid.dims[0]) % grid.dims[1]);
    const int k = static_cast<int>(cell / (static_cast<std::size_t>(grid.dims[0]) * grid.dims[1]));
    if ((grid.cell_position(i, j, k) - x).dot(n) <= 0.0) masked.weights[c] = 0.0;
    sum += masked.weights[c];
  }
  if (!(sum > 0.0)) return plain;
  for (double& v : masked.weights) v /= sum;
  return masked;
}

std::vector<double> interpolate_block(const VolumeGrid& grid, const ProbeWeights& w) {
  std::vector<double> out(grid.block_size(), 0.0);
  for (int c = 0; c < 8; ++c) {
    if (w.weights[c] == 0.0) continue;
    const double* b = grid.block(w.cells[c]);
    for (int q = 0; q < grid.block_size(); ++q) out[q] += w.weights[c] * b[q];
  }
  return out;
}

double query_occlusion(const VolumeGrid& grid, const Vec3& x, const Vec3& n, const Vec3& dir) {
  const auto f = interpolate_block(grid, masked_trilinear_weights(grid, x, n));
  return std::clamp(sh_reconstruct(grid.degree, f, dir), 0.0, 1.0);
}

double ambient_occlusion(const VolumeGrid& grid, const Vec3& x, const Vec3& n) {
  const auto f = interpolate_block(grid, masked_trilinear_weights(grid, x, n));
  return std::clamp(sh_irradiance(grid.degree, f, n) / kPi, 0.0, 1.0);
}

Vec3 query_indirect_irradiance(const VolumeGrid& grid, const Vec3& x, const Vec3& n) {
  if (grid.channels < 3) throw InvalidParameter("illumination grid needs 3 channels");
  const auto f = interpolate_block(grid, trilinear_weights(grid, x));
  const int k = grid.coeff_count();
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    out[c] = std::max(0.0, sh_irradiance(grid.degree, std::span<const double>(f).subspan(c * k, k), n));
  }
  return out;
}

void query_indirect_irradiance_backward(const VolumeGrid& grid, const Vec3& x, const Vec3& n,
                                        const Vec3& grad_out, std::span<double> grad_coeffs) {
  if (grad_coeffs.size() != grid.coeffs.size()) {
    throw InvalidParameter("illumination gradient buffer has the wrong size");
  }
  const ProbeWeights w = trilinear_weights(grid, x);
  const auto f = interpolate_block(grid, w);
  const int k = grid.coeff_count();
  std::array<double, kMaxShCoeffs> basis{};
  sh_eval(grid.degree, n, basis);
  for (int c = 0; c < 3; ++c) {
    double e = 0.0;
    for (int q = 0; q < k; ++q) e += sh_cosine_lobe(sh_band(q)) * f[c * k + q] * basis[q];
    if (!(e > 0.0) || grad_out[c] == 0.0) continue;
    for (int corner = 0; corner < 8; ++corner) {
      if (w.weights[corner] == 0.0) continue;
      double* g = grad_coeffs.data() + w.cells[corner] * grid.block_size() + c * k;
      for (int q = 0; q < k; ++q) {
        g[q] += grad_out[c] * w.weights[corner] * sh_cosine_lobe(sh_band(q)) * basis[q];
      }
    }
  }
}

}  // namespace splatir
