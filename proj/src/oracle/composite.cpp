// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/oracle/composite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace splatir::oracle {
namespace {

using Real = long double;

struct Splat {
  int index;
  Real depth;
  Real mx, my;
  Real ia, ib, ic;  // inverse covariance entries (xx, xy, yy)
  Real opacity;
};

// R(q) S S^T R(q)^T, written out element by element.
void covariance(const Gaussian& g, Real out[3][3]) {
  Real q[4] = {g.rotation[0], g.rotation[1], g.rotation[2], g.rotation[3]};
  const Real len = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  for (Real& v : q) v /= len;
  const Real w = q[0], x = q[1], y = q[2], z = q[3];
  const Real r[3][3] = {{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
                        {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
                        {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
  Real s2[3];
  for (int k = 0; k < 3; ++k) s2[k] = std::exp(2.0L * static_cast<Real>(g.log_scale[k]));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Real acc = 0;
      for (int k = 0; k < 3; ++k) acc += r[i][k] * s2[k] * r[j][k];
      out[i][j] = acc;
    }
  }
}

bool project(const Gaussian& g, const Camera& cam, int index, Splat& out) {
  Real W[3][3], t[3];
  for (int i = 0; i < 3; ++i) {
    t[i] = cam.world_to_camera(i, 3);
    for (int j = 0; j < 3; ++j) {
      W[i][j] = cam.world_to_camera(i, j);
      t[i] += W[i][j] * static_cast<Real>(g.position[j]);
    }
  }
  const Real z = t[2];
  if (!(z > cam.near) || !(z < cam.far)) return false;
  const Real fx = cam.fx, fy = cam.fy;
  const Real J[2][3] = {{fx / z, 0, -fx * t[0] / (z * z)}, {0, fy / z, -fy * t[1] / (z * z)}};
  Real sigma[3][3];
  covariance(g, sigma);
  Real JW[2][3];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      JW[i][j] = 0;
      for (int k = 0; k < 3; ++k) JW[i][j] += J[i][k] * W[k][j];
    }
  }
  Real cov[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Real acc = 0;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) acc += JW[i][a] * sigma[a][b] * JW[j][b];
      }
      cov[i][j] = acc;
    }
  }
  cov[0][0] += 0.3L;
  cov[1][1] += 0.3L;
  const Real c01 = 0.5L * (cov[0][1] + cov[1][0]);
  const Real det = cov[0][0] * cov[1][1] - c01 * c01;
  if (!(det > 0)) return false;
  out.index = index;
  out.depth = z;
  out.mx = fx * t[0] / z + static_cast<Real>(cam.cx);
  out.my = fy * t[1] / z + static_cast<Real>(cam.cy);
  out.ia = cov[1][1] / det;
  out.ib = -c01 / det;
  out.ic = cov[0][0] / det;
  out.opacity = 1.0L / (1.0L + std::exp(-static_cast<Real>(g.opacity_logit)));
  return true;
}

}  // namespace

CompositePixel oracle_composite(const GaussianCloud& cloud, const Camera& cam, int px, int py,
                                std::span<const Vec3> colors, const CompositeOptions& opts) {
  if (colors.size() != cloud.size()) {
    throw std::invalid_argument("oracle_composite: one color per Gaussian required");
  }
  if (cloud.size() > kMaxOracleGaussians) {
    throw std::invalid_argument("oracle_composite: at most 64 Gaussians");
  }
  std::vector<Splat> splats;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Splat s;
    if (project(cloud.gaussians[i], cam, static_cast<int>(i), s) && s.opacity >= opts.min_alpha) {
      splats.push_back(s);
    }
  }
  std::sort(splats.begin(), splats.end(), [](const Splat& a, const Splat& b) {
    return a.depth != b.depth ? a.depth < b.depth : a.index < b.index;
  });

  const Real u = px + 0.5L, v = py + 0.5L;
  Real T = 1, color[3] = {0, 0, 0}, normal[3] = {0, 0, 0};
  Real sum_w = 0, depth_w = 0, peak_w = -1, peak_d = cam.far;
  CompositePixel out;
  for (const Splat& s : splats) {
    const Real dx = u - s.mx, dy = v - s.my;
    const Real power = -0.5L * (s.ia * dx * dx + s.ic * dy * dy) - s.ib * dx * dy;
    const Real a = s.opacity * std::exp(std::min(power, Real(0)));
    if (a < opts.min_alpha) continue;
    const Real w = T * a;
    const Gaussian& g = cloud.gaussians[s.index];
    const Real nlen = std::sqrt(static_cast<Real>(g.normal.squaredNorm()));
    for (int k = 0; k < 3; ++k) {
      color[k] += w * static_cast<Real>(colors[s.index][k]);
      normal[k] += nlen > 1e-12L ? w * static_cast<Real>(g.normal[k]) / nlen : (k == 2 ? w : 0);
    }
    sum_w += w;
    depth_w += w * s.depth;
    if (w > peak_w) {
      peak_w = w;
      peak_d = s.depth;
    }
    ++out.contributors;
    T *= 1 - a;
    if (T < opts.transmittance_cutoff) break;
  }
  for (int k = 0; k < 3; ++k) {
    out.color[k] = static_cast<double>(color[k] + T * static_cast<Real>(opts.background[k]));
    out.normal_accum[k] = static_cast<double>(normal[k]);
  }
  out.alpha = static_cast<double>(sum_w);
  out.covered = sum_w >= opts.coverage_threshold;
  out.depth_vol = out.depth_peak = out.depth_linear = cam.far;
  if (out.covered) {
    out.depth_vol = static_cast<double>(depth_w);
    out.depth_linear = static_cast<double>(depth_w / sum_w);
    out.depth_peak = static_cast<double>(peak_d);
  }
  return out;
}

}  // namespace splatir::oracle
