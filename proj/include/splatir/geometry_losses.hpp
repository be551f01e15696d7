// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/camera.hpp"
#include "splatir/image.hpp"

namespace splatir {

/// Camera-space normals from the screen-space gradient of a depth map (camera z).
/// Pixels are back-projected at their centers and differenced with their left/right and
/// up/down neighbours; the normal faces the camera. Pixels on the border, next to an
/// unmasked neighbour, or with degenerate tangents get (0, 0, 0).
Image depth_to_pseudo_normal(const Image& depth, const Mask& mask, const Camera& cam);

/// Rotates a camera-space normal map into world space. Zero vectors stay zero.
Image camera_to_world_normals(const Image& normals, const Camera& cam);

enum class PenaltyNorm { kL1, kL2 };

/// Mean over valid pixels of the per-pixel norm of (rendered - target). A pixel is valid
/// when it is masked and the target is non-zero. Zero when no pixel is valid.
double loss_normal_penalty(const Image& rendered, const Image& target, const Mask& mask,
                           PenaltyNorm norm = PenaltyNorm::kL1, Image* grad_rendered = nullptr);

inline constexpr double kTvEpsilon = 1e-8;

/// Isotropic total variation, summed over masked pixels:
///   sqrt(sum_c (dx_c^2 + dy_c^2) + eps) - sqrt(eps)
/// with forward differences to the right and lower neighbour (skipped when that
/// neighbour is outside the image or unmasked). An empty mask means every pixel.
double loss_tv(const Image& field, const Mask& mask, Image* grad = nullptr);

inline constexpr double kSsimWeight = 0.2;

/// (1 - w) * mean |rendered - target| + w * (1 - SSIM), w = 0.2.
double loss_color(const Image& rendered, const Image& target, Image* grad_rendered = nullptr);

/// Gradient through n = N / |N| from the renormalized normal image to the raw composite.
/// Pixels with |N| ~ 0 pass no gradient.
Image normalize_image_backward(const Image& accum, const Image& grad_normal);

/// Number of non-zero mask entries.
std::size_t mask_count(const Mask& mask);

}  // namespace splatir
