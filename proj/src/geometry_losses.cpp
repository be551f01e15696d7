// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/geometry_losses.hpp"

#include "splatir/errors.hpp"
#include "splatir/ssim.hpp"

#include <cmath>

namespace splatir {

std::size_t mask_count(const Mask& mask) {
  std::size_t n = 0;
  for (const auto m : mask) n += m ? 1 : 0;
  return n;
}

Image depth_to_pseudo_normal(const Image& depth, const Mask& mask, const Camera& cam) {
  if (depth.channels != 1) throw InvalidParameter("pseudo-normal: depth must be 1 channel");
  if (mask.size() != depth.pixel_count()) {
    throw InvalidParameter("pseudo-normal: mask size does not match depth");
  }
  const int W = depth.width, H = depth.height;
  Image out(W, H, 3);
  auto point = [&](int x, int y) {
    return cam.unproject(x + 0.5, y + 0.5, depth.at(x, y));
  };
  auto ok = [&](int x, int y) {
    return x >= 0 && x < W && y >= 0 && y < H && mask[static_cast<std::size_t>(y) * W + x] &&
           std::isfinite(depth.at(x, y));
  };
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (!ok(x, y) || !ok(x - 1, y) || !ok(x + 1, y) || !ok(x, y - 1) || !ok(x, y + 1)) {
        continue;
      }
      const Vec3 tu = point(x + 1, y) - point(x - 1, y);
      const Vec3 tv = point(x, y + 1) - point(x, y - 1);
      Vec3 n = tu.cross(tv);
      const double len = n.norm();
      if (!(len > 1e-12 * tu.norm() * tv.norm()) || !(len > 0.0)) continue;
      n /= len;
      if (n.dot(point(x, y)) > 0.0) n = -n;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = n[c];
    }
  }
  return out;
}

Image camera_to_world_normals(const Image& normals, const Camera& cam) {
  if (normals.channels != 3) throw InvalidParameter("normal map must have 3 channels");
  const Mat3 Rt = cam.rotation().transpose();
  Image out(normals.width, normals.height, 3);
  for (std::size_t p = 0; p < normals.pixel_count(); ++p) {
    const Vec3 n(normals.data[p * 3], normals.data[p * 3 + 1], normals.data[p * 3 + 2]);
    const Vec3 w = Rt * n;
    for (int c = 0; c < 3; ++c) out.data[p * 3 + c] = w[c];
  }
  return out;
}

double loss_normal_penalty(const Image& rendered, const Image& target, const Mask& mask,
                           PenaltyNorm norm, Image* grad_rendered) {
  require_same_shape(rendered, target, "normal penalty");
  if (rendered.channels != 3) throw InvalidParameter("normal penalty: expected 3 channels");
  if (mask.size() != rendered.pixel_count()) {
    throw InvalidParameter("normal penalty: mask size does not match image");
  }
  if (grad_rendered) *grad_rendered = Image(rendered.width, rendered.height, 3);
  std::size_t count = 0;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    const double* t = target.data.data() + p * 3;
    if (mask[p] && (t[0] != 0.0 || t[1] != 0.0 || t[2] != 0.0)) ++count;
  }
  if (count == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(count);
  double sum = 0.0;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    const double* t = target.data.data() + p * 3;
    if (!mask[p] || (t[0] == 0.0 && t[1] == 0.0 && t[2] == 0.0)) continue;
    const double* r = rendered.data.data() + p * 3;
    const Vec3 d(r[0] - t[0], r[1] - t[1], r[2] - t[2]);
    if (norm == PenaltyNorm::kL1) {
      sum += d.cwiseAbs().sum();
      if (grad_rendered) {
        for (int c = 0; c < 3; ++c) {
          grad_rendered->data[p * 3 + c] = inv * ((d[c] > 0.0) - (d[c] < 0.0));
        }
      }
    } else {
      const double len = d.norm();
      sum += len;
      if (grad_rendered && len > 0.0) {
        for (int c = 0; c < 3; ++c) grad_rendered->data[p * 3 + c] = inv * d[c] / len;
      }
    }
  }
  return sum * inv;
}

double loss_tv(const Image& field, const Mask& mask, Image* grad) {
  if (field.channels < 1) throw InvalidParameter("tv: field needs at least one channel");
  if (!mask.empty() && mask.size() != field.pixel_count()) {
    throw InvalidParameter("tv: mask size does not match field");
  }
  const int W = field.width, H = field.height, C = field.channels;
  auto in = [&](int x, int y) {
    return mask.empty() || mask[static_cast<std::size_t>(y) * W + x] != 0;
  };
  if (grad) *grad = Image(W, H, C);
  const double root_eps = std::sqrt(kTvEpsilon);
  double total = 0.0;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (!in(x, y)) continue;
      const bool right = x + 1 < W && in(x + 1, y);
      const bool down = y + 1 < H && in(x, y + 1);
      if (!right && !down) continue;
      double q = 0.0;
      for (int c = 0; c < C; ++c) {
        const double v = field.at(x, y, c);
        if (right) q += (field.at(x + 1, y, c) - v) * (field.at(x + 1, y, c) - v);
        if (down) q += (field.at(x, y + 1, c) - v) * (field.at(x, y + 1, c) - v);
      }
      const double root = std::sqrt(q + kTvEpsilon);
      total += root - root_eps;
      if (!grad) continue;
      for (int c = 0; c < C; ++c) {
        const double v = field.at(x, y, c);
        if (right) {
          const double g = (field.at(x + 1, y, c) - v) / root;
          grad->at(x + 1, y, c) += g;
          grad->at(x, y, c) -= g;
        }
        if (down) {
          const double g = (field.at(x, y + 1, c) - v) / root;
          grad->at(x, y + 1, c) += g;
          grad->at(x, y, c) -= g;
        }
      }
    }
  }
  return total;
}

double loss_color(const Image& rendered, const Image& target, Image* grad_rendered) {
  require_same_shape(rendered, target, "color loss");
  if (rendered.empty()) throw InvalidParameter("color loss: empty image");
  const double n = static_cast<double>(rendered.data.size());
  double l1 = 0.0;
  for (std::size_t i = 0; i < rendered.data.size(); ++i) {
    l1 += std::abs(rendered.data[i] - target.data[i]);
  }
  l1 /= n;
  double s = 0.0;
  if (grad_rendered) {
    Image g_ssim;
    s = ssim_with_grad(rendered, target, g_ssim);
    *grad_rendered = Image(rendered.width, rendered.height, rendered.channels);
    for (std::size_t i = 0; i < rendered.data.size(); ++i) {
      const double d = rendered.data[i] - target.data[i];
      grad_rendered->data[i] =
          (1.0 - kSsimWeight) * ((d > 0.0) - (d < 0.0)) / n - kSsimWeight * g_ssim.data[i];
    }
  } else {
    s = ssim(rendered, target);
  }
  return (1.0 - kSsimWeight) * l1 + kSsimWeight * (1.0 - s);
}

Image normalize_image_backward(const Image& accum, const Image& grad_normal) {
  require_same_shape(accum, grad_normal, "normalize backward");
  Image out(accum.width, accum.height, accum.channels);
  for (std::size_t p = 0; p < accum.pixel_count(); ++p) {
    const Vec3 N(accum.data[p * 3], accum.data[p * 3 + 1], accum.data[p * 3 + 2]);
    const double len = N.norm();
    if (!(len > 1e-12)) continue;
    const Vec3 n = N / len;
    const Vec3 g(grad_normal.data[p * 3], grad_normal.data[p * 3 + 1], grad_normal.data[p * 3 + 2]);
    const Vec3 r = (g - n * n.dot(g)) / len;
    for (int c = 0; c < 3; ++c) out.data[p * 3 + c] = r[c];
  }
  return out;
}

}  // namespace splatir
