// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/rasterizer.hpp"

#include "splatir/errors.hpp"
#include "splatir/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace splatir {

std::string_view to_string(DepthMode mode) {
  switch (mode) {
    case DepthMode::kVolumeAccumulated: return "vol_accum";
    case DepthMode::kPeak: return "peak";
    case DepthMode::kLinear: return "linear";
  }
  return "linear";
}

DepthMode parse_depth_mode(std::string_view name) {
  if (name == "vol_accum") return DepthMode::kVolumeAccumulated;
  if (name == "peak") return DepthMode::kPeak;
  if (name == "linear") return DepthMode::kLinear;
  throw InvalidParameter("unknown depth mode '" + std::string(name) +
                         "' (expected vol_accum, peak or linear)");
}

const Image& FrameBuffers::depth(DepthMode mode) const {
  switch (mode) {
    case DepthMode::kVolumeAccumulated: return depth_vol;
    case DepthMode::kPeak: return depth_peak;
    case DepthMode::kLinear: return depth_linear;
  }
  return depth_linear;
}

namespace {

/// Per-Gaussian values blended by the compositor.
struct SplatAttributes {
  std::vector<Vec3> colors;
  std::vector<Vec3> normals;     // empty unless normals are requested
  int feature_count = 0;         // materials + extras
  std::vector<double> features;  // Gaussian-major
};

SplatAttributes gather_attributes(const GaussianCloud& cloud, const Camera& cam,
                                  const ChannelSelection& channels, const RenderInputs& inputs) {
  const std::size_t n = cloud.size();
  if (!inputs.colors.empty() && inputs.colors.size() != n) {
    throw InvalidParameter("rasterizer: color override size does not match the cloud");
  }
  if (inputs.extra_channels > 0 && inputs.extra.size() != n * inputs.extra_channels) {
    throw InvalidParameter("rasterizer: extra feature size does not match the cloud");
  }
  SplatAttributes attr;
  attr.colors.resize(n);
  const Vec3 eye = cam.center();
  for (std::size_t i = 0; i < n; ++i) {
    const Gaussian& g = cloud.gaussians[i];
    if (!inputs.colors.empty()) {
      attr.colors[i] = inputs.colors[i];
    } else {
      const Vec3 dir = g.position - eye;
      attr.colors[i] = dir.norm() > 1e-12 ? sh_color(g, cloud.sh_degree, dir)
                                          : sh_color(g, cloud.sh_degree, Vec3::UnitZ());
    }
  }
  if (channels.normal) {
    attr.normals.resize(n);
    for (std::size_t i = 0; i < n; ++i) attr.normals[i] = normal_of(cloud.gaussians[i]);
  }
  const int material = channels.material ? kMaterialChannels : 0;
  attr.feature_count = material + std::max(0, inputs.extra_channels);
  attr.features.assign(n * attr.feature_count, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* f = attr.features.data() + i * attr.feature_count;
    if (material) {
      const Gaussian& g = cloud.gaussians[i];
      const Vec3 a = albedo_of(g);
      f[0] = a.x();
      f[1] = a.y();
      f[2] = a.z();
      f[3] = roughness_of(g);
      f[4] = metallic_of(g);
    }
    for (int c = 0; c < inputs.extra_channels; ++c) {
      f[material + c] = inputs.extra[i * inputs.extra_channels + c];
    }
  }
  return attr;
}

struct Contributor {
  int record;
  double g;
  double a;
  double transmittance;  // before this splat
};

/// The single definition of which splats blend into pixel (px, py) and with what weights.
/// Forward and backward both call it, so they agree on every skip and the early exit.
void collect_contributors(const SplatList& list, const std::vector<int>& tile, int px, int py,
                          const RasterSettings& settings, std::vector<Contributor>& out) {
  out.clear();
  const double u = px + 0.5;
  const double v = py + 0.5;
  double T = 1.0;
  for (const int r : tile) {
    const SplatRecord& s = list.records[r];
    if (px < s.px_min || px > s.px_max || py < s.py_min || py > s.py_max) continue;
    const double dx = u - s.mean.x();
    const double dy = v - s.mean.y();
    const double power = -0.5 * (s.conic_a * dx * dx + s.conic_c * dy * dy) - s.conic_b * dx * dy;
    const double g = std::exp(std::min(power, 0.0));
    const double a = s.opacity * g;
    if (a < settings.min_alpha) continue;
    out.push_back({r, g, a, T});
    T *= 1.0 - a;
    if (T < settings.transmittance_cutoff) break;
  }
}

void check_inputs(const Camera& cam, const RasterSettings& settings) {
  cam.validate();
  if (settings.tile_size <= 0) throw InvalidParameter("rasterizer: tile size must be positive");
}

}  // namespace

SplatList build_splat_list(const GaussianCloud& cloud, const Camera& cam,
                           const RasterSettings& settings) {
  check_inputs(cam, settings);
  SplatList list;
  const int ts = settings.tile_size;
  list.tiles_x = (cam.width + ts - 1) / ts;
  list.tiles_y = (cam.height + ts - 1) / ts;
  list.tile_lists.resize(static_cast<std::size_t>(list.tiles_x) * list.tiles_y);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Gaussian& g = cloud.gaussians[i];
    const auto proj = project_gaussian(g, cam);
    if (!proj) continue;
    const double opacity = opacity_of(g);
    if (opacity < settings.min_alpha || !(opacity > 0.0)) continue;
    const double det = proj->cov.determinant();
    if (!(det > 0.0) || !std::isfinite(det)) continue;

    SplatRecord rec;
    rec.gaussian = static_cast<int>(i);
    rec.mean = proj->mean;
    rec.depth = proj->depth;
    rec.opacity = opacity;
    rec.conic_a = proj->cov(1, 1) / det;
    rec.conic_b = -proj->cov(0, 1) / det;
    rec.conic_c = proj->cov(0, 0) / det;

    // Mahalanobis radius beyond which opacity * g < min_alpha.
    const double r2 = settings.min_alpha > 0.0
                          ? 2.0 * std::log(opacity / settings.min_alpha)
                          : std::numeric_limits<double>::infinity();
    const double ex = std::sqrt(r2 * proj->cov(0, 0));
    const double ey = std::sqrt(r2 * proj->cov(1, 1));
    const double lo_x = std::ceil(rec.mean.x() - ex - 0.5);
    const double hi_x = std::floor(rec.mean.x() + ex - 0.5);
    const double lo_y = std::ceil(rec.mean.y() - ey - 0.5);
    const double hi_y = std::floor(rec.mean.y() + ey - 0.5);
    if (!(hi_x >= 0.0) || !(lo_x <= cam.width - 1.0) || !(hi_y >= 0.0) ||
        !(lo_y <= cam.height - 1.0)) {
      continue;
    }
    rec.px_min = static_cast<int>(std::max(lo_x, 0.0));
    rec.px_max = static_cast<int>(std::min(hi_x, cam.width - 1.0));
    rec.py_min = static_cast<int>(std::max(lo_y, 0.0));
    rec.py_max = static_cast<int>(std::min(hi_y, cam.height - 1.0));
    if (rec.px_min > rec.px_max || rec.py_min > rec.py_max) continue;
    list.records.push_back(rec);
  }

  std::sort(list.records.begin(), list.records.end(),
            [](const SplatRecord& a, const SplatRecord& b) {
              if (a.depth != b.depth) return a.depth < b.depth;
              return a.gaussian < b.gaussian;
            });

  for (int r = 0; r < static_cast<int>(list.records.size()); ++r) {
    const SplatRecord& s = list.records[r];
    for (int ty = s.py_min / ts; ty <= s.py_max / ts; ++ty) {
      for (int tx = s.px_min / ts; tx <= s.px_max / ts; ++tx) {
        list.tile_lists[static_cast<std::size_t>(ty) * list.tiles_x + tx].push_back(r);
      }
    }
  }
  return list;
}

FrameBuffers rasterize_forward(const GaussianCloud& cloud, const Camera& cam,
                               const ChannelSelection& channels, const RasterSettings& settings,
                               const RenderInputs& inputs) {
  const SplatList list = build_splat_list(cloud, cam, settings);
  const SplatAttributes attr = gather_attributes(cloud, cam, channels, inputs);
  const int W = cam.width, H = cam.height, C = attr.feature_count;

  FrameBuffers fb;
  fb.color = Image(W, H, 3);
  fb.alpha = Image(W, H, 1);
  fb.depth_vol = Image(W, H, 1, cam.far);
  fb.depth_peak = Image(W, H, 1, cam.far);
  fb.depth_linear = Image(W, H, 1, cam.far);
  fb.coverage.assign(static_cast<std::size_t>(W) * H, 0);
  if (channels.normal) {
    fb.normal = Image(W, H, 3);
    fb.normal_accum = Image(W, H, 3);
  }
  if (C > 0) fb.features = Image(W, H, C);
  fb.contributors.assign(static_cast<std::size_t>(W) * H, 0);
  fb.peak_gaussian.assign(static_cast<std::size_t>(W) * H, -1);

  const int ts = settings.tile_size;
  parallel_for(list.tile_lists.size(), settings.workers, [&](std::size_t t) {
    const int tx = static_cast<int>(t) % list.tiles_x;
    const int ty = static_cast<int>(t) / list.tiles_x;
    const std::vector<int>& tile = list.tile_lists[t];
    std::vector<Contributor> contribs;
    std::vector<double> feat(C);
    for (int py = ty * ts; py < std::min(H, (ty + 1) * ts); ++py) {
      for (int px = tx * ts; px < std::min(W, (tx + 1) * ts); ++px) {
        collect_contributors(list, tile, px, py, settings, contribs);
        Vec3 color = Vec3::Zero();
        Vec3 normal = Vec3::Zero();
        std::fill(feat.begin(), feat.end(), 0.0);
        double sum_w = 0.0, depth_w = 0.0, peak_w = -1.0, peak_d = cam.far, T = 1.0;
        int peak_g = -1;
        for (const Contributor& c : contribs) {
          const SplatRecord& s = list.records[c.record];
          const double w = c.transmittance * c.a;
          color += w * attr.colors[s.gaussian];
          if (channels.normal) normal += w * attr.normals[s.gaussian];
          const double* f = attr.features.data() + static_cast<std::size_t>(s.gaussian) * C;
          for (int k = 0; k < C; ++k) feat[k] += w * f[k];
          sum_w += w;
          depth_w += w * s.depth;
          if (w > peak_w) {
            peak_w = w;
            peak_d = s.depth;
            peak_g = s.gaussian;
          }
          T = c.transmittance * (1.0 - c.a);
        }
        color += T * settings.background;
        const std::size_t p = static_cast<std::size_t>(py) * W + px;
        for (int k = 0; k < 3; ++k) fb.color.data[p * 3 + k] = color[k];
        fb.alpha.data[p] = sum_w;
        fb.contributors[p] = static_cast<int>(contribs.size());
        fb.peak_gaussian[p] = peak_g;
        for (int k = 0; k < C; ++k) fb.features.data[p * C + k] = feat[k];
        const bool covered = sum_w >= settings.coverage_threshold;
        fb.coverage[p] = covered ? 1 : 0;
        if (covered) {
          fb.depth_vol.data[p] = depth_w;
          fb.depth_linear.data[p] = depth_w / sum_w;
          fb.depth_peak.data[p] = peak_d;
        }
        if (channels.normal) {
          for (int k = 0; k < 3; ++k) fb.normal_accum.data[p * 3 + k] = normal[k];
          const double len = normal.norm();
          if (covered && len > 1e-12) {
            for (int k = 0; k < 3; ++k) fb.normal.data[p * 3 + k] = normal[k] / len;
          }
        }
      }
    }
  });
  return fb;
}

Image render_depth(const GaussianCloud& cloud, const Camera& cam, DepthMode mode,
                   const RasterSettings& settings) {
  FrameBuffers fb = rasterize_forward(cloud, cam, {}, settings);
  switch (mode) {
    case DepthMode::kVolumeAccumulated: return std::move(fb.depth_vol);
    case DepthMode::kPeak: return std::move(fb.depth_peak);
    case DepthMode::kLinear: return std::move(fb.depth_linear);
  }
  return std::move(fb.depth_linear);
}

namespace {

// Layout of the per-record screen-space gradient.
constexpr int kGMean = 0;     // 2
constexpr int kGConic = 2;    // 3 (a, b, c)
constexpr int kGOpacity = 5;  // 1
constexpr int kGDepth = 6;    // 1
constexpr int kGColor = 7;    // 3
constexpr int kGNormal = 10;  // 3
constexpr int kGFeature = 13;

void check_gradient_shape(const Image& img, int W, int H, int C, const char* name) {
  if (img.empty()) return;
  if (img.width != W || img.height != H || img.channels != C) {
    throw InvalidParameter(std::string("rasterize_backward: upstream '") + name +
                           "' has the wrong shape");
  }
}

}  // namespace

RasterGradients rasterize_backward(const GaussianCloud& cloud, const Camera& cam,
                                   const ChannelSelection& channels,
                                   const FrameGradients& up, const RasterSettings& settings,
                                   const RenderInputs& inputs) {
  const SplatList list = build_splat_list(cloud, cam, settings);
  const SplatAttributes attr = gather_attributes(cloud, cam, channels, inputs);
  const int W = cam.width, H = cam.height, C = attr.feature_count;
  const int stride = kGFeature + C;

  check_gradient_shape(up.color, W, H, 3, "color");
  check_gradient_shape(up.alpha, W, H, 1, "alpha");
  check_gradient_shape(up.depth_vol, W, H, 1, "depth_vol");
  check_gradient_shape(up.depth_peak, W, H, 1, "depth_peak");
  check_gradient_shape(up.depth_linear, W, H, 1, "depth_linear");
  check_gradient_shape(up.normal_accum, W, H, 3, "normal_accum");
  check_gradient_shape(up.features, W, H, C, "features");
  if (!up.normal_accum.empty() && !channels.normal) {
    throw InvalidParameter("rasterize_backward: normal gradient given but normals not selected");
  }

  const int ts = settings.tile_size;
  std::vector<std::vector<double>> tile_grads(list.tile_lists.size());

  parallel_for(list.tile_lists.size(), settings.workers, [&](std::size_t t) {
    const std::vector<int>& tile = list.tile_lists[t];
    if (tile.empty()) return;
    std::vector<double>& acc = tile_grads[t];
    acc.assign(tile.size() * stride, 0.0);
    const int tx = static_cast<int>(t) % list.tiles_x;
    const int ty = static_cast<int>(t) / list.tiles_x;
    std::vector<Contributor> contribs;
    std::vector<double> s_k;
    std::vector<int> slot;
    for (int py = ty * ts; py < std::min(H, (ty + 1) * ts); ++py) {
      for (int px = tx * ts; px < std::min(W, (tx + 1) * ts); ++px) {
        collect_contributors(list, tile, px, py, settings, contribs);
        if (contribs.empty()) continue;
        const std::size_t p = static_cast<std::size_t>(py) * W + px;

        Vec3 g_color = Vec3::Zero();
        if (!up.color.empty()) g_color = Vec3(up.color.data[p * 3], up.color.data[p * 3 + 1],
                                              up.color.data[p * 3 + 2]);
        Vec3 g_normal = Vec3::Zero();
        if (!up.normal_accum.empty()) {
          g_normal = Vec3(up.normal_accum.data[p * 3], up.normal_accum.data[p * 3 + 1],
                          up.normal_accum.data[p * 3 + 2]);
        }
        const double* g_feat = up.features.empty() ? nullptr : up.features.data.data() + p * C;
        const double g_alpha = up.alpha.empty() ? 0.0 : up.alpha.data[p];

        double sum_w = 0.0, depth_w = 0.0, peak_w = -1.0;
        int peak_index = -1;
        for (int k = 0; k < static_cast<int>(contribs.size()); ++k) {
          const double w = contribs[k].transmittance * contribs[k].a;
          sum_w += w;
          depth_w += w * list.records[contribs[k].record].depth;
          if (w > peak_w) {
            peak_w = w;
            peak_index = k;
          }
        }
        const bool covered = sum_w >= settings.coverage_threshold;
        const double g_dvol = covered && !up.depth_vol.empty() ? up.depth_vol.data[p] : 0.0;
        const double g_dlin =
            covered && !up.depth_linear.empty() ? up.depth_linear.data[p] : 0.0;
        const double g_dpeak = covered && !up.depth_peak.empty() ? up.depth_peak.data[p] : 0.0;
        const double d_linear = covered ? depth_w / sum_w : 0.0;

        // s_k = dL/dw_k holding the other weights fixed.
        const int K = static_cast<int>(contribs.size());
        s_k.resize(K);
        slot.resize(K);
        for (int k = 0; k < K; ++k) {
          const Contributor& c = contribs[k];
          const SplatRecord& rec = list.records[c.record];
          const int gi = rec.gaussian;
          const double w = c.transmittance * c.a;
          double s = g_color.dot(attr.colors[gi]) + g_alpha + g_dvol * rec.depth;
          if (covered) s += g_dlin * (rec.depth - d_linear) / sum_w;
          if (channels.normal) s += g_normal.dot(attr.normals[gi]);
          const double* f = attr.features.data() + static_cast<std::size_t>(gi) * C;
          if (g_feat) {
            for (int q = 0; q < C; ++q) s += g_feat[q] * f[q];
          }
          s_k[k] = s;

          // Locate this record in the tile list (records are sorted, tile list too).
          const auto it = std::lower_bound(tile.begin(), tile.end(), c.record);
          slot[k] = static_cast<int>(it - tile.begin());
          double* a = acc.data() + static_cast<std::size_t>(slot[k]) * stride;
          for (int q = 0; q < 3; ++q) a[kGColor + q] += w * g_color[q];
          if (channels.normal) {
            for (int q = 0; q < 3; ++q) a[kGNormal + q] += w * g_normal[q];
          }
          if (g_feat) {
            for (int q = 0; q < C; ++q) a[kGFeature + q] += w * g_feat[q];
          }
          double g_depth = g_dvol * w;
          if (covered) g_depth += g_dlin * w / sum_w;
          if (k == peak_index) g_depth += g_dpeak;
          a[kGDepth] += g_depth;
        }

        // Back to front: S holds the gradient flowing through later splats and the
        // background, scaled by the transmittance past the current one.
        double S = g_color.dot(settings.background);
        for (int k = K - 1; k >= 0; --k) {
          const Contributor& c = contribs[k];
          const SplatRecord& rec = list.records[c.record];
          const double g_a = c.transmittance * (s_k[k] - S);
          S = s_k[k] * c.a + (1.0 - c.a) * S;

          double* a = acc.data() + static_cast<std::size_t>(slot[k]) * stride;
          a[kGOpacity] += g_a * c.g;
          const double g_power = g_a * c.a;
          const double dx = px + 0.5 - rec.mean.x();
          const double dy = py + 0.5 - rec.mean.y();
          a[kGMean + 0] += g_power * (rec.conic_a * dx + rec.conic_b * dy);
          a[kGMean + 1] += g_power * (rec.conic_b * dx + rec.conic_c * dy);
          a[kGConic + 0] += g_power * (-0.5 * dx * dx);
          a[kGConic + 1] += g_power * (-dx * dy);
          a[kGConic + 2] += g_power * (-0.5 * dy * dy);
        }
      }
    }
  });

  // Fixed-order reduction over tiles.
  std::vector<double> rec_grads(list.records.size() * stride, 0.0);
  for (std::size_t t = 0; t < list.tile_lists.size(); ++t) {
    const std::vector<int>& tile = list.tile_lists[t];
    const std::vector<double>& acc = tile_grads[t];
    if (acc.empty()) continue;
    for (std::size_t j = 0; j < tile.size(); ++j) {
      double* dst = rec_grads.data() + static_cast<std::size_t>(tile[j]) * stride;
      const double* src = acc.data() + j * stride;
      for (int q = 0; q < stride; ++q) dst[q] += src[q];
    }
  }

  RasterGradients out;
  out.cloud = zero_gradient(cloud.size());
  out.colors.assign(cloud.size(), Vec3::Zero());
  out.extra.assign(cloud.size() * std::max(0, inputs.extra_channels), 0.0);
  const int material = channels.material ? kMaterialChannels : 0;
  const Mat3 Wr = cam.rotation();
  const Vec3 eye = cam.center();
  const bool sh_colors = inputs.colors.empty();

  parallel_for(list.records.size(), settings.workers, [&](std::size_t r) {
    const SplatRecord& rec = list.records[r];
    const double* gr = rec_grads.data() + r * stride;
    const Gaussian& g = cloud.gaussians[rec.gaussian];
    Gaussian& dg = out.cloud[rec.gaussian];

    // Opacity.
    const double o = rec.opacity;
    dg.opacity_logit += gr[kGOpacity] * o * (1.0 - o);

    // Conic -> screen covariance -> camera covariance -> world covariance.
    const Vec3 t = cam.to_camera(g.position);
    const double z = t.z(), iz = 1.0 / z, iz2 = iz * iz;
    Eigen::Matrix<double, 2, 3> J;
    J << cam.fx * iz, 0.0, -cam.fx * t.x() * iz2, 0.0, cam.fy * iz, -cam.fy * t.y() * iz2;
    const Vec3 scale = scale_of(g);
    const Mat3 R = quaternion_to_matrix(g.rotation);
    const Mat3 M = R * scale.asDiagonal();
    const Mat3 sigma = M * M.transpose();
    const Mat3 V = Wr * sigma * Wr.transpose();
    Mat2 conic;
    conic << rec.conic_a, rec.conic_b, rec.conic_b, rec.conic_c;
    Mat2 g_conic;
    g_conic << gr[kGConic], 0.5 * gr[kGConic + 1], 0.5 * gr[kGConic + 1], gr[kGConic + 2];
    const Mat2 g_cov2 = -conic * g_conic * conic;
    const Mat3 g_V = J.transpose() * g_cov2 * J;
    const Eigen::Matrix<double, 2, 3> g_J = 2.0 * g_cov2 * J * V;
    const Mat3 g_sigma = Wr.transpose() * g_V * Wr;
    const Mat3 g_M = 2.0 * g_sigma * M;
    const Mat3 RtgM = R.transpose() * g_M;
    for (int k = 0; k < 3; ++k) dg.log_scale[k] += RtgM(k, k) * scale[k];
    const Mat3 g_R = g_M * scale.asDiagonal();
    dg.rotation += quaternion_to_matrix_backward(g.rotation, g_R);

    // Camera-space center: mean, Jacobian and depth.
    const double gmx = gr[kGMean], gmy = gr[kGMean + 1];
    Vec3 g_t;
    g_t.x() = gmx * cam.fx * iz + g_J(0, 2) * (-cam.fx * iz2);
    g_t.y() = gmy * cam.fy * iz + g_J(1, 2) * (-cam.fy * iz2);
    g_t.z() = -gmx * cam.fx * t.x() * iz2 - gmy * cam.fy * t.y() * iz2 +
              g_J(0, 0) * (-cam.fx * iz2) + g_J(0, 2) * (2.0 * cam.fx * t.x() * iz2 * iz) +
              g_J(1, 1) * (-cam.fy * iz2) + g_J(1, 2) * (2.0 * cam.fy * t.y() * iz2 * iz) +
              gr[kGDepth];
    dg.position += Wr.transpose() * g_t;

    // Color.
    const Vec3 g_col(gr[kGColor], gr[kGColor + 1], gr[kGColor + 2]);
    out.colors[rec.gaussian] = g_col;
    if (sh_colors) {
      const Vec3 dir_raw = g.position - eye;
      if (dir_raw.norm() > 1e-12) {
        const Vec3 dir = dir_raw.normalized();
        std::array<double, kMaxShCoeffs> basis{};
        sh_eval(cloud.sh_degree, dir, basis);
        const int n_coeffs = sh_coeff_count(cloud.sh_degree);
        Vec3 raw = Vec3::Constant(kShColorOffset);
        for (int k = 0; k < n_coeffs; ++k) raw += basis[k] * g.sh[k];
        Vec3 g_raw = g_col;
        for (int q = 0; q < 3; ++q) {
          if (raw[q] < 0.0) g_raw[q] = 0.0;
        }
        std::array<double, kMaxShCoeffs> w{};
        for (int k = 0; k < n_coeffs; ++k) {
          dg.sh[k] += basis[k] * g_raw;
          w[k] = g_raw.dot(g.sh[k]);
        }
        Vec3 g_dir = Vec3::Zero();
        sh_eval_backward(cloud.sh_degree, dir, w, g_dir);
        dg.position += normalize_backward(dir_raw, g_dir);
      }
    }

    if (channels.normal) {
      const Vec3 g_n(gr[kGNormal], gr[kGNormal + 1], gr[kGNormal + 2]);
      dg.normal += normalize_backward(g.normal, g_n);
    }
    if (material) {
      const Vec3 a = albedo_of(g);
      for (int q = 0; q < 3; ++q) dg.albedo_logit[q] += gr[kGFeature + q] * a[q] * (1.0 - a[q]);
      const double rough = roughness_of(g);
      dg.roughness_logit += gr[kGFeature + 3] * rough * (1.0 - rough);
      const double metal = metallic_of(g);
      dg.metallic_logit += gr[kGFeature + 4] * metal * (1.0 - metal);
    }
    for (int q = 0; q < inputs.extra_channels; ++q) {
      out.extra[static_cast<std::size_t>(rec.gaussian) * inputs.extra_channels + q] =
          gr[kGFeature + material + q];
    }
  });
  return out;
}

}  // namespace splatir
