// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/metrics.hpp"

#include "splatir/errors.hpp"
#include "splatir/ssim.hpp"

#include <algorithm>
#include <cmath>

namespace splatir {
namespace {

void check_mask(const Image& img, const Mask& mask) {
  if (!mask.empty() && mask.size() != img.pixel_count()) {
    throw InvalidParameter("mask size does not match the image");
  }
}

}  // namespace

double metric_psnr(const Image& a, const Image& b, const Mask& mask) {
  require_same_shape(a, b, "psnr");
  check_mask(a, mask);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    if (!mask.empty() && !mask[p]) continue;
    for (int c = 0; c < a.channels; ++c) {
      const double d = a.data[p * a.channels + c] - b.data[p * a.channels + c];
      sum += d * d;
      ++n;
    }
  }
  if (n == 0) throw InvalidParameter("psnr: no valid pixels");
  const double mse = sum / static_cast<double>(n);
  if (mse < 1e-10) return kMaxPsnr;
  return std::min(kMaxPsnr, 10.0 * std::log10(1.0 / mse));
}

double metric_ssim(const Image& a, const Image& b) { return ssim(a, b); }

double metric_normal_mae(const Image& a, const Image& b, const Mask& mask) {
  require_same_shape(a, b, "normal MAE");
  if (a.channels != 3) throw InvalidParameter("normal MAE: expected 3 channels");
  check_mask(a, mask);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    if (!mask.empty() && !mask[p]) continue;
    const Vec3 u(a.data[p * 3], a.data[p * 3 + 1], a.data[p * 3 + 2]);
    const Vec3 v(b.data[p * 3], b.data[p * 3 + 1], b.data[p * 3 + 2]);
    sum += std::acos(std::clamp(u.dot(v), -1.0, 1.0));
    ++n;
  }
  if (n == 0) throw InvalidParameter("no valid pixels");
  return sum / static_cast<double>(n) * 180.0 / kPi;
}

Vec3 per_channel_scale(const Image& a, const Image& b, const Mask& mask) {
  require_same_shape(a, b, "channel scale");
  check_mask(a, mask);
  if (a.channels != 3) throw InvalidParameter("channel scale: expected 3 channels");
  Vec3 num = Vec3::Zero(), den = Vec3::Zero();
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    if (!mask.empty() && !mask[p]) continue;
    for (int c = 0; c < 3; ++c) {
      num[c] += a.data[p * 3 + c] * b.data[p * 3 + c];
      den[c] += a.data[p * 3 + c] * a.data[p * 3 + c];
    }
  }
  Vec3 s;
  for (int c = 0; c < 3; ++c) s[c] = den[c] > 0.0 ? num[c] / den[c] : 1.0;
  return s;
}

Image scaled(const Image& img, const Vec3& s) {
  Image out = img;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    for (int c = 0; c < img.channels; ++c) out.data[p * img.channels + c] *= s[c % 3];
  }
  return out;
}

}  // namespace splatir
