// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/cubemap.hpp"
#include "splatir/errors.hpp"
#include "splatir/sh.hpp"
#include "splatir/synth.hpp"
#include "splatir/volumes.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

namespace splatir {
namespace {

Cubemap filled_cubemap(int res, const std::function<double(const Vec3&)>& f) {
  Cubemap cm(res, 1);
  for (int face = 0; face < kCubeFaces; ++face) {
    for (int y = 0; y < res; ++y) {
      for (int x = 0; x < res; ++x) cm.faces[face].at(x, y) = f(texel_direction(face, x, y, res));
    }
  }
  return cm;
}

std::vector<Vec3> random_directions(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) out.push_back(Vec3(n(rng), n(rng), n(rng)).normalized());
  return out;
}

TEST(Cubemap, SolidAnglesSumToFourPi) {
  for (int res : {1, 7, 32, 64}) {
    double total = 0;
    for (int y = 0; y < res; ++y) {
      for (int x = 0; x < res; ++x) total += texel_solid_angle(x, y, res);
    }
    EXPECT_NEAR(6.0 * total, 4.0 * kPi, 1e-4) << res;
  }
}

TEST(Cubemap, AxisDirectionsHitFaceCenters) {
  const Vec3 axes[6] = {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(),
                        -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
  for (int face = 0; face < kCubeFaces; ++face) {
    const FaceCoord fc = direction_to_face(axes[face], 16);
    EXPECT_EQ(fc.face, face);
    EXPECT_NEAR(fc.u, 8.0, 1e-12);
    EXPECT_NEAR(fc.v, 8.0, 1e-12);
  }
}

TEST(Cubemap, DirectionToFaceInvertsTexelDirection) {
  const int res = 12;
  for (int face = 0; face < kCubeFaces; ++face) {
    for (int y = 0; y < res; ++y) {
      for (int x = 0; x < res; ++x) {
        const FaceCoord fc = direction_to_face(texel_direction(face, x, y, res), res);
        EXPECT_EQ(fc.face, face);
        EXPECT_NEAR(fc.u, x + 0.5, 1e-9);
        EXPECT_NEAR(fc.v, y + 0.5, 1e-9);
      }
    }
  }
}

TEST(Cubemap, FaceCamerasProjectTexelDirections) {
  const Vec3 c(0.3, -0.2, 0.5);
  for (int face = 0; face < kCubeFaces; ++face) {
    const Camera cam = face_camera(face, c, 8, 0.01, 100.0);
    EXPECT_NO_THROW(cam.validate());
    const Vec3 p = cam.to_camera(c + 2.0 * texel_direction(face, 3, 5, 8));
    EXPECT_NEAR(cam.fx * p.x() / p.z() + cam.cx, 3.5, 1e-9);
    EXPECT_NEAR(cam.fy * p.y() / p.z() + cam.cy, 5.5, 1e-9);
  }
}

TEST(Cubemap, EmptyCloudGivesSentinelAndBackground) {
  GaussianCloud empty;
  RasterSettings s;
  s.background = Vec3(0.1, 0.2, 0.3);
  const CellCubemaps cm = render_cell_cubemaps(empty, Vec3::Zero(), 8, s);
  for (int face = 0; face < kCubeFaces; ++face) {
    for (double d : cm.depth.faces[face].data) EXPECT_EQ(d, cm.depth.sentinel);
    EXPECT_DOUBLE_EQ(cm.radiance.faces[face].at(3, 3, 2), 0.3);
  }
}

TEST(Cubemap, SingleSplatAlongPlusX) {
  GaussianCloud cloud;
  cloud.sh_degree = 0;
  Gaussian g;
  g.position = Vec3(2, 0, 0);
  g.log_scale = Vec3(std::log(0.02), std::log(0.3), std::log(0.3));
  g.opacity_logit = 30.0;
  cloud.gaussians = {g};
  const CellCubemaps cm = render_cell_cubemaps(cloud, Vec3::Zero(), 16, {});
  EXPECT_NEAR(cm.depth.faces[0].at(8, 8), 2.0, 1e-6);
  for (int face = 1; face < kCubeFaces; ++face) {
    EXPECT_EQ(cm.depth.faces[face].at(8, 8), cm.depth.sentinel) << face;
  }
}

TEST(Occlusion, ThresholdRule) {
  Cubemap depth(2, 1, 0.0);
  depth.sentinel = 100.0;
  for (int face = 0; face < kCubeFaces; ++face) depth.faces[face].data = {0.5, 5.0, 100.0, 0.5};
  const Cubemap o = occlusion_from_depth(depth, 1.0);
  EXPECT_EQ(o.faces[2].data[0], 1.0);
  EXPECT_EQ(o.faces[2].data[1], 0.0);
  EXPECT_EQ(o.faces[2].data[2], 0.0);  // sentinel: open sky
  EXPECT_THROW(occlusion_from_depth(depth, 0.0), InvalidParameter);
}

TEST(ShProjection, ConstantCubemap) {
  const auto f = sh_project_cubemap(filled_cubemap(64, [](const Vec3&) { return 1.0; }), 2);
  EXPECT_NEAR(f[0], 2.0 * std::sqrt(kPi), 1e-3);
  for (std::size_t k = 1; k < f.size(); ++k) EXPECT_LT(std::abs(f[k]), 1e-3);
}

TEST(ShProjection, ClampedCosineAtDegreeTwo) {
  const auto f = sh_project_cubemap(
      filled_cubemap(64, [](const Vec3& d) { return std::max(0.0, d.z()); }), 2);
  double se = 0;
  const auto dirs = random_directions(1000, 3);
  for (const Vec3& d : dirs) {
    const double e = sh_reconstruct(2, f, d) - std::max(0.0, d.z());
    se += e * e;
  }
  EXPECT_LT(std::sqrt(se / dirs.size()), 0.05);
}

TEST(ShProjection, Y10Recovered) {
  const auto f = sh_project_cubemap(
      filled_cubemap(64, [](const Vec3& d) { return sh_eval(1, d)[2]; }), 2);
  EXPECT_NEAR(f[2], 1.0, 1e-2);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (k == 2) continue;
    EXPECT_LT(std::abs(f[k]), 1e-2);
  }
}

TEST(ShProjection, BandLimitedRoundTrip) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int degree : {2, 3}) {
    std::vector<double> c(sh_coeff_count(degree));
    for (double& v : c) v = n(rng);
    const auto f = sh_project_cubemap(
        filled_cubemap(32, [&](const Vec3& d) { return sh_reconstruct(degree, c, d); }), degree);
    double se = 0;
    const auto dirs = random_directions(500, 5);
    for (const Vec3& d : dirs) {
      const double e = sh_reconstruct(degree, f, d) - sh_reconstruct(degree, c, d);
      se += e * e;
    }
    EXPECT_LT(std::sqrt(se / dirs.size()), 1e-2);
  }
}

TEST(Bake, EmptyCloudHasNoOcclusion) {
  BakeConfig cfg;
  cfg.dims = {2, 2, 2};
  cfg.face_resolution = 8;
  const BakedVolumes v = bake_volumes(GaussianCloud{}, cfg);
  for (double c : v.occlusion.coeffs) EXPECT_EQ(c, 0.0);
}

double mean_occlusion(const VolumeGrid& grid, std::size_t cell) {
  const auto dirs = random_directions(2000, 8);
  std::vector<double> f(grid.block(cell), grid.block(cell) + grid.coeff_count());
  double s = 0;
  for (const Vec3& d : dirs) s += std::clamp(sh_reconstruct(grid.degree, f, d), 0.0, 1.0);
  return s / dirs.size();
}

TEST(Bake, CellInsideClosedShellIsOccluded) {
  SynthParams p;
  p.count = 1500;
  const SynthScene scene = synth_scene(SynthKind::kSphere, p, 1);
  BakeConfig cfg;
  cfg.dims = {2, 2, 2};
  cfg.min = Vec3::Constant(-0.1);
  cfg.max = Vec3::Constant(0.1);
  cfg.tau = 1.5;
  cfg.face_resolution = 24;
  const BakedVolumes v = bake_volumes(scene.cloud, cfg);
  for (std::size_t cell = 0; cell < v.occlusion.cell_count(); ++cell) {
    EXPECT_GT(mean_occlusion(v.occlusion, cell), 0.9);
  }
}

TEST(Bake, OutsideCellLessOccludedThanInsideCell) {
  SynthParams p;
  p.count = 1500;
  const SynthScene scene = synth_scene(SynthKind::kBox, p, 2);
  BakeConfig cfg;
  cfg.dims = {2, 2, 2};
  cfg.min = Vec3(0.0, -0.1, -0.1);   // x = 0 inside the box, x = 2 outside
  cfg.max = Vec3(2.0, 0.1, 0.1);
  cfg.tau = 3.0;
  cfg.face_resolution = 24;
  const BakedVolumes v = bake_volumes(scene.cloud, cfg);
  const double inside = mean_occlusion(v.occlusion, v.occlusion.cell_index(0, 0, 0));
  const double outside = mean_occlusion(v.occlusion, v.occlusion.cell_index(1, 0, 0));
  EXPECT_LT(outside, inside);
  EXPECT_GT(inside, 0.9);
}

TEST(Bake, WorkerCountDoesNotChangeResult) {
  SynthParams p;
  p.count = 300;
  const SynthScene scene = synth_scene(SynthKind::kSphere, p, 3);
  BakeConfig cfg = default_bake_config(scene.cloud);
  cfg.dims = {3, 3, 2};
  cfg.face_resolution = 8;
  cfg.raster.workers = 1;
  const BakedVolumes a = bake_volumes(scene.cloud, cfg);
  cfg.raster.workers = 3;
  const BakedVolumes b = bake_volumes(scene.cloud, cfg);
  EXPECT_EQ(a.occlusion.coeffs, b.occlusion.coeffs);
  EXPECT_EQ(a.illumination.coeffs, b.illumination.coeffs);
}

TEST(Bake, DefaultConfigInflatesBounds) {
  GaussianCloud cloud;
  Gaussian g;
  g.position = Vec3(-1, -2, -3);
  cloud.gaussians.push_back(g);
  g.position = Vec3(1, 2, 3);
  cloud.gaussians.push_back(g);
  const BakeConfig cfg = default_bake_config(cloud);
  EXPECT_TRUE(cfg.min.isApprox(Vec3(-1.1, -2.2, -3.3)));
  EXPECT_TRUE(cfg.max.isApprox(Vec3(1.1, 2.2, 3.3)));
  EXPECT_NEAR(cfg.tau, 0.1 * Vec3(2.2, 4.4, 6.6).norm(), 1e-12);
  EXPECT_EQ(cfg.dims, (std::array<int, 3>{16, 16, 16}));
  EXPECT_EQ(cfg.face_resolution, 64);
  EXPECT_EQ(cfg.degree, 2);
}

VolumeGrid random_grid(std::mt19937_64& rng, int channels, std::array<int, 3> dims = {4, 4, 4}) {
  VolumeGrid g(dims, Vec3(-1, -1, -1), Vec3(1, 1, 1), 2, channels);
  std::normal_distribution<double> n(0.0, 0.3);
  for (double& c : g.coeffs) c = n(rng);
  return g;
}

TEST(MaskedTrilinear, UpperFourCellsAtCellCenter) {
  std::mt19937_64 rng(1);
  const VolumeGrid g = random_grid(rng, 1, {3, 3, 3});
  // Probes sit at -1, 0, 1; (0.5, 0.5, 0.5) is the center of the upper octant cell.
  const ProbeWeights w = masked_trilinear_weights(g, Vec3(0.5, 0.5, 0.5), Vec3::UnitZ());
  for (int c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(w.weights[c], (c >> 2) & 1 ? 0.25 : 0.0);
}

TEST(MaskedTrilinear, UniformGridEqualsSingleCell) {
  VolumeGrid g({4, 4, 4}, Vec3(-1, -1, -1), Vec3(1, 1, 1), 2, 1);
  const std::vector<double> c = {0.9, 0.1, 0.3, -0.2, 0.05, 0.0, 0.1, -0.05, 0.02};
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) std::copy(c.begin(), c.end(), g.block(cell));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (const Vec3& n : random_directions(30, 9)) {
    const Vec3 x(u(rng), u(rng), u(rng));
    const Vec3 dir = random_directions(1, rng())[0];
    EXPECT_NEAR(query_occlusion(g, x, n, dir), std::clamp(sh_reconstruct(2, c, dir), 0.0, 1.0), 1e-12);
  }
}

// Direct re-derivation of the masked weights from the probe positions.
std::vector<double> naive_masked(const VolumeGrid& g, const Vec3& x, const Vec3& n) {
  const double h = (g.max.x() - g.min.x()) / (g.dims[0] - 1);
  const int i0 = std::clamp(static_cast<int>(std::floor((x.x() - g.min.x()) / h)), 0, g.dims[0] - 2);
  const int j0 = std::clamp(static_cast<int>(std::floor((x.y() - g.min.y()) / h)), 0, g.dims[1] - 2);
  const int k0 = std::clamp(static_cast<int>(std::floor((x.z() - g.min.z()) / h)), 0, g.dims[2] - 2);
  std::vector<double> acc(g.block_size(), 0.0), plain(g.block_size(), 0.0);
  double wsum = 0;
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const Vec3 p = g.min + h * Vec3(i0 + dx, j0 + dy, k0 + dz);
        const Vec3 t = ((x - g.min) / h - Vec3(i0, j0, k0)).cwiseMax(0.0).cwiseMin(1.0);
        const double w = (dx ? t.x() : 1 - t.x()) * (dy ? t.y() : 1 - t.y()) * (dz ? t.z() : 1 - t.z());
        const double* b = g.block(g.cell_index(i0 + dx, j0 + dy, k0 + dz));
        const double wm = (p - x).dot(n) > 0 ? w : 0.0;
        wsum += wm;
        for (int q = 0; q < g.block_size(); ++q) {
          acc[q] += wm * b[q];
          plain[q] += w * b[q];
        }
      }
    }
  }
  if (!(wsum > 0)) return plain;
  for (double& v : acc) v /= wsum;
  return acc;
}

TEST(MaskedTrilinear, MatchesNaiveInterpolation) {
  std::mt19937_64 rng(3);
  const VolumeGrid g = random_grid(rng, 1);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (const Vec3& n : random_directions(200, 10)) {
    const Vec3 x(u(rng), u(rng), u(rng));
    const auto got = interpolate_block(g, masked_trilinear_weights(g, x, n));
    const auto want = naive_masked(g, x, n);
    for (std::size_t q = 0; q < got.size(); ++q) EXPECT_NEAR(got[q], want[q], 1e-12);
  }
}

TEST(MaskedTrilinear, AllMaskedFallsBackToPlainTrilinear) {
  std::mt19937_64 rng(4);
  const VolumeGrid g = random_grid(rng, 1, {2, 2, 2});
  // x beyond every probe along +z with n = +z: every probe lies behind the tangent plane.
  const Vec3 x(0.2, -0.3, 1.5);
  const ProbeWeights m = masked_trilinear_weights(g, x, Vec3::UnitZ());
  const ProbeWeights p = trilinear_weights(g, x);
  for (int c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(m.weights[c], p.weights[c]);
}

TEST(MaskedTrilinear, WeightsNonNegativeAndNormalized) {
  std::mt19937_64 rng(5);
  const VolumeGrid g = random_grid(rng, 1);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  for (const Vec3& n : random_directions(500, 11)) {
    const Vec3 x(u(rng), u(rng), u(rng));
    const ProbeWeights w = masked_trilinear_weights(g, x, n);
    double s = 0;
    for (double v : w.weights) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    const double o = query_occlusion(g, x, n, random_directions(1, rng())[0]);
    EXPECT_GE(o, 0.0);
    EXPECT_LE(o, 1.0);
  }
}

TEST(IndirectIrradiance, ZeroGridGivesZero) {
  VolumeGrid g({2, 2, 2}, Vec3::Zero(), Vec3::Ones(), 2, 3);
  EXPECT_EQ(query_indirect_irradiance(g, Vec3::Constant(0.5), Vec3::UnitZ()), Vec3::Zero());
}

TEST(IndirectIrradiance, ConstantRadianceGivesPi) {
  VolumeGrid g({2, 2, 2}, Vec3::Zero(), Vec3::Ones(), 2, 3);
  // Projection of L = 1 from a cubemap, so the test goes through the baking path.
  const auto f = sh_project_cubemap(filled_cubemap(32, [](const Vec3&) { return 1.0; }), 2);
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    for (int c = 0; c < 3; ++c) std::copy(f.begin(), f.end(), g.block(cell) + c * 9);
  }
  for (const Vec3& n : random_directions(20, 12)) {
    const Vec3 e = query_indirect_irradiance(g, Vec3(0.3, 0.6, 0.2), n);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(e[c], kPi, 0.02 * kPi);
  }
}

TEST(IndirectIrradiance, MidpointAveragesTwoCells) {
  std::mt19937_64 rng(6);
  VolumeGrid g({2, 2, 2}, Vec3::Zero(), Vec3::Ones(), 2, 3);
  VolumeGrid lo = g, hi = g;
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<double> a(27), b(27);
  for (int q = 0; q < 27; ++q) {
    a[q] = q % 9 == 0 ? 2.0 + u(rng) : u(rng) * 0.2;
    b[q] = q % 9 == 0 ? 2.0 + u(rng) : u(rng) * 0.2;
  }
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      std::copy(a.begin(), a.end(), g.block(g.cell_index(0, j, k)));
      std::copy(b.begin(), b.end(), g.block(g.cell_index(1, j, k)));
      std::copy(a.begin(), a.end(), lo.block(lo.cell_index(0, j, k)));
      std::copy(a.begin(), a.end(), lo.block(lo.cell_index(1, j, k)));
      std::copy(b.begin(), b.end(), hi.block(hi.cell_index(0, j, k)));
      std::copy(b.begin(), b.end(), hi.block(hi.cell_index(1, j, k)));
    }
  }
  const Vec3 x(0.5, 0.3, 0.7), n = Vec3(0.2, 0.5, 0.8).normalized();
  const Vec3 mid = query_indirect_irradiance(g, x, n);
  const Vec3 avg = 0.5 * (query_indirect_irradiance(lo, x, n) + query_indirect_irradiance(hi, x, n));
  EXPECT_LT((mid - avg).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IndirectIrradiance, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  VolumeGrid g = random_grid(rng, 3, {3, 3, 3});
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    for (int c = 0; c < 3; ++c) g.block(cell)[c * 9] += 2.0;  // keep irradiance positive
  }
  const Vec3 x(0.1, -0.4, 0.3), n = Vec3(0.3, -0.2, 0.9).normalized(), w(0.7, -0.3, 1.1);
  std::vector<double> grad(g.coeffs.size(), 0.0);
  query_indirect_irradiance_backward(g, x, n, w, grad);
  for (std::size_t q = 0; q < g.coeffs.size(); ++q) {
    VolumeGrid p = g, m = g;
    p.coeffs[q] += 1e-6;
    m.coeffs[q] -= 1e-6;
    const double num = (w.dot(query_indirect_irradiance(p, x, n)) - w.dot(query_indirect_irradiance(m, x, n))) / 2e-6;
    EXPECT_NEAR(grad[q], num, 1e-7);
  }
}

TEST(Volumes, CombineSplitRoundTrip) {
  std::mt19937_64 rng(8);
  BakedVolumes v{random_grid(rng, 1), random_grid(rng, 3)};
  const BakedVolumes back = split_volumes(combine_volumes(v));
  EXPECT_EQ(back.occlusion.coeffs, v.occlusion.coeffs);
  EXPECT_EQ(back.illumination.coeffs, v.illumination.coeffs);
}

TEST(Volumes, ValidateRejectsBadGrids) {
  VolumeGrid g({2, 2, 2}, Vec3::Zero(), Vec3::Ones(), 2, 1);
  EXPECT_NO_THROW(g.validate());
  g.coeffs.pop_back();
  EXPECT_THROW(g.validate(), InvalidParameter);
  VolumeGrid flat({2, 2, 2}, Vec3::Zero(), Vec3(1, 0, 1), 2, 1);
  EXPECT_THROW(flat.validate(), InvalidParameter);
}

}  // namespace
}  // namespace splatir
