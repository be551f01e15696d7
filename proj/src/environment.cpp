// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/environment.hpp"

#include "splatir/brdf.hpp"
#include "splatir/errors.hpp"
#include "splatir/parallel.hpp"
#include "splatir/sh.hpp"

#include <algorithm>
#include <cmath>

namespace splatir {

EnvironmentMap::EnvironmentMap(int h, int w, double raw_fill) : height(h), width(w) {
  if (h < 2 || w < 2) throw InvalidParameter("environment map must be at least 2x2");
  raw.assign(static_cast<std::size_t>(h) * w * 3, raw_fill);
}

EnvironmentMap EnvironmentMap::from_radiance(const Image& radiance) {
  if (radiance.channels != 3) throw InvalidParameter("environment radiance must be RGB");
  EnvironmentMap env(radiance.height, radiance.width);
  for (std::size_t i = 0; i < radiance.data.size(); ++i) {
    const double v = radiance.data[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidParameter("environment radiance must be finite and non-negative");
    }
    env.raw[i] = inverse_softplus(std::max(v, 1e-12));
  }
  return env;
}

Image EnvironmentMap::radiance() const {
  Image img(width, height, 3);
  for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = softplus(raw[i]);
  return img;
}

Vec3 EnvironmentMap::texel_radiance(int row, int col) const {
  const double* r = raw.data() + (static_cast<std::size_t>(row) * width + col) * 3;
  return {softplus(r[0]), softplus(r[1]), softplus(r[2])};
}

namespace {

Vec3 latlong_direction(int row, int col, int height, int width) {
  const double theta = (row + 0.5) / height * kPi;
  const double phi = (col + 0.5) / width * 2.0 * kPi - kPi;
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double latlong_solid_angle(int row, int height, int width) {
  const double t0 = static_cast<double>(row) / height * kPi;
  const double t1 = static_cast<double>(row + 1) / height * kPi;
  return 2.0 * kPi / width * (std::cos(t0) - std::cos(t1));
}

}  // namespace

Vec3 EnvironmentMap::texel_direction(int row, int col) const {
  return latlong_direction(row, col, height, width);
}

double EnvironmentMap::texel_solid_angle(int row) const {
  return latlong_solid_angle(row, height, width);
}

Vec2 direction_to_latlong(const Vec3& dir, int height, int width) {
  const Vec3 d = dir.normalized();
  const double theta = std::acos(std::clamp(d.z(), -1.0, 1.0));
  const double phi = std::atan2(d.y(), d.x());
  return {(phi + kPi) / (2.0 * kPi) * width, theta / kPi * height};
}

BilinearTaps latlong_taps(const Vec3& dir, int height, int width) {
  const Vec2 uv = direction_to_latlong(dir, height, width);
  const double fx = uv.x() - 0.5, fy = uv.y() - 0.5;
  const double cx0 = std::floor(fx), cy0 = std::floor(fy);
  const double wx = fx - cx0, wy = fy - cy0;
  auto wrap = [&](int c) { return ((c % width) + width) % width; };
  auto clamp_row = [&](int r) { return std::clamp(r, 0, height - 1); };
  const int c0 = wrap(static_cast<int>(cx0)), c1 = wrap(static_cast<int>(cx0) + 1);
  const int r0 = clamp_row(static_cast<int>(cy0)), r1 = clamp_row(static_cast<int>(cy0) + 1);
  BilinearTaps t;
  t.texels = {static_cast<std::size_t>(r0) * width + c0, static_cast<std::size_t>(r0) * width + c1,
              static_cast<std::size_t>(r1) * width + c0, static_cast<std::size_t>(r1) * width + c1};
  t.weights = {(1 - wx) * (1 - wy), wx * (1 - wy), (1 - wx) * wy, wx * wy};
  return t;
}

PrefilteredEnv make_prefilter(int height, int width, int levels) {
  if (levels < 2) throw InvalidParameter("prefilter needs at least 2 levels");
  PrefilteredEnv pre;
  pre.height = height;
  pre.width = width;
  pre.levels = levels;
  const std::size_t N = static_cast<std::size_t>(height) * width;
  pre.images.assign(levels, std::vector<double>(N * 3, 0.0));
  pre.operators.assign(levels, {});
  std::vector<Vec3> dirs(N);
  std::vector<double> omega(N);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      dirs[static_cast<std::size_t>(r) * width + c] = latlong_direction(r, c, height, width);
      omega[static_cast<std::size_t>(r) * width + c] = latlong_solid_angle(r, height, width);
    }
  }
  for (int level = 1; level < levels; ++level) {
    const double rough = static_cast<double>(level) / (levels - 1);
    std::vector<double>& op = pre.operators[level];
    op.assign(N * N, 0.0);
    parallel_for(N, 0, [&](std::size_t o) {
      const Vec3& r = dirs[o];
      double sum = 0.0;
      double* row = op.data() + o * N;
      for (std::size_t i = 0; i < N; ++i) {
        const double nl = r.dot(dirs[i]);
        if (nl <= 0.0) continue;
        const double nh = r.dot((r + dirs[i]).normalized());
        const double w = ggx_distribution(nh, rough) / 4.0 * nl * omega[i];
        row[i] = w;
        sum += w;
      }
      if (sum > 0.0) {
        for (std::size_t i = 0; i < N; ++i) row[i] /= sum;
      } else {
        row[o] = 1.0;
      }
    });
  }
  return pre;
}

void update_prefilter(PrefilteredEnv& pre, const Image& radiance) {
  if (radiance.width != pre.width || radiance.height != pre.height || radiance.channels != 3) {
    throw InvalidParameter("prefilter: radiance shape does not match the operators");
  }
  const std::size_t N = static_cast<std::size_t>(pre.height) * pre.width;
  pre.images[0] = radiance.data;
  for (int level = 1; level < pre.levels; ++level) {
    const std::vector<double>& op = pre.operators[level];
    std::vector<double>& out = pre.images[level];
    for (std::size_t o = 0; o < N; ++o) {
      double acc[3] = {0.0, 0.0, 0.0};
      const double* row = op.data() + o * N;
      for (std::size_t i = 0; i < N; ++i) {
        if (row[i] == 0.0) continue;
        for (int c = 0; c < 3; ++c) acc[c] += row[i] * radiance.data[i * 3 + c];
      }
      for (int c = 0; c < 3; ++c) out[o * 3 + c] = acc[c];
    }
  }
}

PrefilteredEnv prefilter_environment(const EnvironmentMap& env, int levels) {
  PrefilteredEnv pre = make_prefilter(env.height, env.width, levels);
  update_prefilter(pre, env.radiance());
  return pre;
}

namespace {

struct LevelBlend {
  int l0;
  double f;
};

LevelBlend level_blend(double roughness, int levels) {
  const double t = std::clamp(roughness, 0.0, 1.0) * (levels - 1);
  const int l0 = std::min(static_cast<int>(t), levels - 2);
  return {l0, t - l0};
}

Vec3 level_sample(const std::vector<double>& img, const BilinearTaps& taps) {
  Vec3 v = Vec3::Zero();
  for (int k = 0; k < 4; ++k) {
    v += taps.weights[k] * Vec3(img[taps.texels[k] * 3], img[taps.texels[k] * 3 + 1],
                                img[taps.texels[k] * 3 + 2]);
  }
  return v;
}

}  // namespace

Vec3 PrefilteredEnv::sample(const Vec3& dir, double roughness) const {
  const BilinearTaps taps = latlong_taps(dir, height, width);
  const LevelBlend b = level_blend(roughness, levels);
  return (1.0 - b.f) * level_sample(images[b.l0], taps) + b.f * level_sample(images[b.l0 + 1], taps);
}

Vec3 PrefilteredEnv::sample_backward(const Vec3& dir, double roughness, const Vec3& grad_out,
                                     std::vector<std::vector<double>>& level_grads) const {
  const BilinearTaps taps = latlong_taps(dir, height, width);
  const LevelBlend b = level_blend(roughness, levels);
  for (int k = 0; k < 4; ++k) {
    for (int c = 0; c < 3; ++c) {
      level_grads[b.l0][taps.texels[k] * 3 + c] += (1.0 - b.f) * taps.weights[k] * grad_out[c];
      level_grads[b.l0 + 1][taps.texels[k] * 3 + c] += b.f * taps.weights[k] * grad_out[c];
    }
  }
  if (!(roughness > 0.0 && roughness < 1.0)) return Vec3::Zero();
  return (level_sample(images[b.l0 + 1], taps) - level_sample(images[b.l0], taps)) * (levels - 1);
}

std::vector<double> PrefilteredEnv::to_source_gradient(
    const std::vector<std::vector<double>>& level_grads) const {
  const std::size_t N = static_cast<std::size_t>(height) * width;
  std::vector<double> g = level_grads[0];
  for (int level = 1; level < levels; ++level) {
    const std::vector<double>& op = operators[level];
    const std::vector<double>& lg = level_grads[level];
    for (std::size_t o = 0; o < N; ++o) {
      if (lg[o * 3] == 0.0 && lg[o * 3 + 1] == 0.0 && lg[o * 3 + 2] == 0.0) continue;
      const double* row = op.data() + o * N;
      for (std::size_t i = 0; i < N; ++i) {
        if (row[i] == 0.0) continue;
        for (int c = 0; c < 3; ++c) g[i * 3 + c] += row[i] * lg[o * 3 + c];
      }
    }
  }
  return g;
}

std::array<double, 3 * kEnvShCoeffs> env_sh_project(const Image& radiance) {
  std::array<double, 3 * kEnvShCoeffs> sh{};
  std::array<double, kMaxShCoeffs> basis{};
  for (int r = 0; r < radiance.height; ++r) {
    const double omega = latlong_solid_angle(r, radiance.height, radiance.width);
    for (int c = 0; c < radiance.width; ++c) {
      sh_eval(kEnvShDegree, latlong_direction(r, c, radiance.height, radiance.width), basis);
      for (int ch = 0; ch < 3; ++ch) {
        const double v = radiance.at(c, r, ch) * omega;
        for (int k = 0; k < kEnvShCoeffs; ++k) sh[ch * kEnvShCoeffs + k] += v * basis[k];
      }
    }
  }
  return sh;
}

Vec3 env_irradiance(std::span<const double> sh, const Vec3& n) {
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    out[c] = std::max(0.0, sh_irradiance(kEnvShDegree, sh.subspan(c * kEnvShCoeffs, kEnvShCoeffs), n));
  }
  return out;
}

void env_irradiance_backward(std::span<const double> sh, const Vec3& n, const Vec3& grad_out,
                             std::span<double> grad_sh) {
  std::array<double, kMaxShCoeffs> basis{};
  sh_eval(kEnvShDegree, n, basis);
  for (int c = 0; c < 3; ++c) {
    double e = 0.0;
    for (int k = 0; k < kEnvShCoeffs; ++k) {
      e += sh_cosine_lobe(sh_band(k)) * sh[c * kEnvShCoeffs + k] * basis[k];
    }
    if (!(e > 0.0)) continue;
    for (int k = 0; k < kEnvShCoeffs; ++k) {
      grad_sh[c * kEnvShCoeffs + k] += grad_out[c] * sh_cosine_lobe(sh_band(k)) * basis[k];
    }
  }
}

std::vector<double> env_sh_project_backward(int height, int width, std::span<const double> grad_sh) {
  std::vector<double> g(static_cast<std::size_t>(height) * width * 3, 0.0);
  std::array<double, kMaxShCoeffs> basis{};
  for (int r = 0; r < height; ++r) {
    const double omega = latlong_solid_angle(r, height, width);
    for (int c = 0; c < width; ++c) {
      sh_eval(kEnvShDegree, latlong_direction(r, c, height, width), basis);
      const std::size_t t = static_cast<std::size_t>(r) * width + c;
      for (int ch = 0; ch < 3; ++ch) {
        double s = 0.0;
        for (int k = 0; k < kEnvShCoeffs; ++k) s += grad_sh[ch * kEnvShCoeffs + k] * basis[k];
        g[t * 3 + ch] = s * omega;
      }
    }
  }
  return g;
}

}  // namespace splatir
