// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/image.hpp"
#include "splatir/math.hpp"

namespace splatir {

inline constexpr double kMaxPsnr = 99.0;

/// 10 log10(1 / MSE), reported as 99 dB when MSE < 1e-10. An optional mask restricts the
/// pixels (all channels of a masked pixel count).
double metric_psnr(const Image& a, const Image& b, const Mask& mask = {});
double metric_ssim(const Image& a, const Image& b);
/// Mean angle in degrees between unit normals over masked pixels. Throws
/// InvalidParameter("no valid pixels") for an empty mask.
double metric_normal_mae(const Image& a, const Image& b, const Mask& mask);

/// Per-channel least-squares scale s_c minimizing sum (s_c a - b)^2 over masked pixels.
Vec3 per_channel_scale(const Image& a, const Image& b, const Mask& mask);
Image scaled(const Image& img, const Vec3& s);

}  // namespace splatir
