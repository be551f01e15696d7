// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/math.hpp"

#include <array>
#include <span>
#include <vector>

namespace splatir {

inline constexpr int kMaxShDegree = 3;
inline constexpr int kMaxShCoeffs = 16;

constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

/// Band index l of the flat coefficient index k = l*l + l + m.
constexpr int sh_band(int k) {
  int l = 0;
  while ((l + 1) * (l + 1) <= k) ++l;
  return l;
}

/// Real spherical harmonics, orthonormal on the sphere, ordered by band then m = -l..l.
/// Signs follow the Condon-Shortley convention used by splatting PLY files
/// (Y_{1,-1} = -c*y, Y_{1,0} = c*z, Y_{1,1} = -c*x).
///
/// `out` must hold sh_coeff_count(degree) values. Throws InvalidParameter for a
/// degree outside [0, 3] or a zero-length direction; other directions are normalized.
void sh_eval(int degree, const Vec3& direction, std::span<double> out);
std::vector<double> sh_eval(int degree, const Vec3& direction);

/// Adds d(sum_k weights[k] * Y_k(d)) / dd to `grad`, treating the basis as the
/// polynomial in (x, y, z) evaluated by sh_eval (no normalization Jacobian).
void sh_eval_backward(int degree, const Vec3& direction, std::span<const double> weights,
                      Vec3& grad);

/// Clamped-cosine convolution weight of a band: pi, 2pi/3, pi/4, 0 for l = 0..3.
double sh_cosine_lobe(int band);

/// Evaluates sum_k coeffs[k] * Y_k(direction).
double sh_reconstruct(int degree, std::span<const double> coeffs, const Vec3& direction);

/// Irradiance (cosine-weighted hemisphere integral) of the band-limited radiance
/// `coeffs` about unit normal n.
double sh_irradiance(int degree, std::span<const double> coeffs, const Vec3& n);

}  // namespace splatir
