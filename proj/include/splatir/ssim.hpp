// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/image.hpp"

namespace splatir {

/// Structural similarity with an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
/// C2 = 0.03^2 and zero padding. Averaged over pixels and channels.
double ssim(const Image& a, const Image& b);

/// Same value; also writes dSSIM/da into `grad_a` (shape of a).
double ssim_with_grad(const Image& a, const Image& b, Image& grad_a);

}  // namespace splatir
