// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/ssim.hpp"

#include "splatir/errors.hpp"

#include <array>
#include <cmath>

namespace splatir {
namespace {

constexpr int kRadius = 5;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, 2 * kRadius + 1> window_1d() {
  std::array<double, 2 * kRadius + 1> w{};
  double sum = 0.0;
  for (int i = -kRadius; i <= kRadius; ++i) {
    w[i + kRadius] = std::exp(-(i * i) / (2.0 * kSigma * kSigma));
    sum += w[i + kRadius];
  }
  for (double& v : w) v /= sum;
  return w;
}

/// Separable "same" filtering of one channel plane with zero padding.
std::vector<double> blur(const std::vector<double>& src, int W, int H) {
  static const auto w = window_1d();
  std::vector<double> tmp(src.size(), 0.0), out(src.size(), 0.0);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      double s = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) {
        const int xx = x + k;
        if (xx >= 0 && xx < W) s += w[k + kRadius] * src[static_cast<std::size_t>(y) * W + xx];
      }
      tmp[static_cast<std::size_t>(y) * W + x] = s;
    }
  }
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      double s = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) {
        const int yy = y + k;
        if (yy >= 0 && yy < H) s += w[k + kRadius] * tmp[static_cast<std::size_t>(yy) * W + x];
      }
      out[static_cast<std::size_t>(y) * W + x] = s;
    }
  }
  return out;
}

double ssim_impl(const Image& a, const Image& b, Image* grad) {
  require_same_shape(a, b, "ssim");
  if (a.empty()) throw InvalidParameter("ssim: empty image");
  const int W = a.width, H = a.height, C = a.channels;
  const std::size_t n = a.pixel_count();
  if (grad) *grad = Image(W, H, C);
  double total = 0.0;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (int c = 0; c < C; ++c) {
    for (std::size_t p = 0; p < n; ++p) {
      x[p] = a.data[p * C + c];
      y[p] = b.data[p * C + c];
      xx[p] = x[p] * x[p];
      yy[p] = y[p] * y[p];
      xy[p] = x[p] * y[p];
    }
    const auto mx = blur(x, W, H), my = blur(y, W, H);
    const auto exx = blur(xx, W, H), eyy = blur(yy, W, H), exy = blur(xy, W, H);
    std::vector<double> d_mu(n), d_exx(n), d_exy(n);
    for (std::size_t p = 0; p < n; ++p) {
      const double a1 = 2.0 * mx[p] * my[p] + kC1;
      const double a2 = 2.0 * (exy[p] - mx[p] * my[p]) + kC2;
      const double b1 = mx[p] * mx[p] + my[p] * my[p] + kC1;
      const double b2 = (exx[p] - mx[p] * mx[p]) + (eyy[p] - my[p] * my[p]) + kC2;
      const double s = (a1 * a2) / (b1 * b2);
      total += s;
      if (grad) {
        d_mu[p] = s * (2.0 * my[p] / a1 - 2.0 * my[p] / a2 - 2.0 * mx[p] / b1 +
                       2.0 * mx[p] / b2);
        d_exx[p] = -s / b2;
        d_exy[p] = 2.0 * s / a2;
      }
    }
    if (grad) {
      // The window is symmetric, so the adjoint of blur is blur.
      const auto g_mu = blur(d_mu, W, H), g_exx = blur(d_exx, W, H), g_exy = blur(d_exy, W, H);
      const double norm = 1.0 / (static_cast<double>(n) * C);
      for (std::size_t p = 0; p < n; ++p) {
        grad->data[p * C + c] = norm * (g_mu[p] + 2.0 * x[p] * g_exx[p] + y[p] * g_exy[p]);
      }
    }
  }
  return total / (static_cast<double>(n) * C);
}

}  // namespace

double ssim(const Image& a, const Image& b) { return ssim_impl(a, b, nullptr); }

double ssim_with_grad(const Image& a, const Image& b, Image& grad_a) {
  return ssim_impl(a, b, &grad_a);
}

}  // namespace splatir
