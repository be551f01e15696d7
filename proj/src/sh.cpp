// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/sh.hpp"

#include "splatir/errors.hpp"

#include <string>

namespace splatir {
namespace {

constexpr double kC0 = 0.28209479177387814;
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                          -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                          0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                          -0.5900435899266435};

void check_degree(int degree) {
  if (degree < 0 || degree > kMaxShDegree) {
    throw InvalidParameter("SH degree must be in [0, 3], got " + std::to_string(degree));
  }
}

}  // namespace

void sh_eval(int degree, const Vec3& direction, std::span<double> out) {
  check_degree(degree);
  const double len = direction.norm();
  if (!(len > 1e-12) || !std::isfinite(len)) {
    throw InvalidParameter("SH direction must be non-zero and finite");
  }
  if (static_cast<int>(out.size()) < sh_coeff_count(degree)) {
    throw InvalidParameter("SH output span too small");
  }
  const Vec3 d = direction / len;
  const double x = d.x(), y = d.y(), z = d.z();
  out[0] = kC0;
  if (degree < 1) return;
  out[1] = -kC1 * y;
  out[2] = kC1 * z;
  out[3] = -kC1 * x;
  if (degree < 2) return;
  const double xx = x * x, yy = y * y, zz = z * z;
  out[4] = kC2[0] * x * y;
  out[5] = kC2[1] * y * z;
  out[6] = kC2[2] * (2.0 * zz - xx - yy);
  out[7] = kC2[3] * x * z;
  out[8] = kC2[4] * (xx - yy);
  if (degree < 3) return;
  out[9] = kC3[0] * y * (3.0 * xx - yy);
  out[10] = kC3[1] * x * y * z;
  out[11] = kC3[2] * y * (4.0 * zz - xx - yy);
  out[12] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
  out[13] = kC3[4] * x * (4.0 * zz - xx - yy);
  out[14] = kC3[5] * z * (xx - yy);
  out[15] = kC3[6] * x * (xx - 3.0 * yy);
}

std::vector<double> sh_eval(int degree, const Vec3& direction) {
  check_degree(degree);
  std::vector<double> out(sh_coeff_count(degree));
  sh_eval(degree, direction, out);
  return out;
}

void sh_eval_backward(int degree, const Vec3& d, std::span<const double> w, Vec3& grad) {
  check_degree(degree);
  if (degree < 1) return;
  const double x = d.x(), y = d.y(), z = d.z();
  grad += Vec3(-kC1 * w[3], -kC1 * w[1], kC1 * w[2]);
  if (degree < 2) return;
  const double xx = x * x, yy = y * y, zz = z * z;
  grad += w[4] * kC2[0] * Vec3(y, x, 0.0);
  grad += w[5] * kC2[1] * Vec3(0.0, z, y);
  grad += w[6] * kC2[2] * Vec3(-2.0 * x, -2.0 * y, 4.0 * z);
  grad += w[7] * kC2[3] * Vec3(z, 0.0, x);
  grad += w[8] * kC2[4] * Vec3(2.0 * x, -2.0 * y, 0.0);
  if (degree < 3) return;
  grad += w[9] * kC3[0] * Vec3(6.0 * x * y, 3.0 * xx - 3.0 * yy, 0.0);
  grad += w[10] * kC3[1] * Vec3(y * z, x * z, x * y);
  grad += w[11] * kC3[2] * Vec3(-2.0 * x * y, 4.0 * zz - xx - 3.0 * yy, 8.0 * y * z);
  grad += w[12] * kC3[3] * Vec3(-6.0 * x * z, -6.0 * y * z, 6.0 * zz - 3.0 * xx - 3.0 * yy);
  grad += w[13] * kC3[4] * Vec3(4.0 * zz - 3.0 * xx - yy, -2.0 * x * y, 8.0 * x * z);
  grad += w[14] * kC3[5] * Vec3(2.0 * x * z, -2.0 * y * z, xx - yy);
  grad += w[15] * kC3[6] * Vec3(3.0 * xx - 3.0 * yy, -6.0 * x * y, 0.0);
}

double sh_cosine_lobe(int band) {
  switch (band) {
    case 0: return kPi;
    case 1: return 2.0 * kPi / 3.0;
    case 2: return kPi / 4.0;
    default: return 0.0;
  }
}

double sh_reconstruct(int degree, std::span<const double> coeffs, const Vec3& direction) {
  std::array<double, kMaxShCoeffs> basis{};
  sh_eval(degree, direction, basis);
  double sum = 0.0;
  for (int k = 0; k < sh_coeff_count(degree); ++k) sum += coeffs[k] * basis[k];
  return sum;
}

double sh_irradiance(int degree, std::span<const double> coeffs, const Vec3& n) {
  std::array<double, kMaxShCoeffs> basis{};
  sh_eval(degree, n, basis);
  double sum = 0.0;
  for (int k = 0; k < sh_coeff_count(degree); ++k) {
    sum += sh_cosine_lobe(sh_band(k)) * coeffs[k] * basis[k];
  }
  return sum;
}

}  // namespace splatir
