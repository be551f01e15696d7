// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/oracle/hemisphere_mc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace splatir::oracle {

Vec3 cosine_sample_local(double u1, double u2) {
  const double a = 2.0 * u1 - 1.0;
  const double b = 2.0 * u2 - 1.0;
  double r = 0.0, phi = 0.0;
  if (a == 0.0 && b == 0.0) {
    r = 0.0;
  } else if (std::abs(a) > std::abs(b)) {
    r = a;
    phi = 0.25 * kPi * (b / a);
  } else {
    r = b;
    phi = 0.5 * kPi - 0.25 * kPi * (a / b);
  }
  const double x = r * std::cos(phi);
  const double y = r * std::sin(phi);
  return {x, y, std::sqrt(std::max(0.0, 1.0 - x * x - y * y))};
}

McEstimate oracle_hemisphere_mc(const HemisphereIntegrand& f, const Vec3& n_in,
                                std::size_t samples, std::uint64_t seed) {
  if (samples < 1024) throw std::invalid_argument("oracle_hemisphere_mc: samples must be >= 1024");
  const Vec3 n = n_in.normalized();
  const Vec3 t = n.unitOrthogonal();
  const Vec3 b = n.cross(t);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  std::vector<long double> sum, sum_sq;
  for (std::size_t i = 0; i < samples; ++i) {
    const double u1 = uni(rng);
    const double u2 = uni(rng);
    const Vec3 local = cosine_sample_local(u1, u2);
    const Vec3 l = local.x() * t + local.y() * b + local.z() * n;
    const std::vector<double> val = f(l);
    if (sum.empty()) {
      sum.assign(val.size(), 0.0L);
      sum_sq.assign(val.size(), 0.0L);
    }
    if (val.size() != sum.size()) {
      throw std::invalid_argument("oracle_hemisphere_mc: integrand changed channel count");
    }
    // pdf = cos / pi, so each sample contributes pi * f.
    for (std::size_t c = 0; c < val.size(); ++c) {
      const long double x = static_cast<long double>(kPi) * val[c];
      sum[c] += x;
      sum_sq[c] += x * x;
    }
  }
  McEstimate est;
  est.count = samples;
  const long double N = static_cast<long double>(samples);
  for (std::size_t c = 0; c < sum.size(); ++c) {
    const long double mean = sum[c] / N;
    const long double var = std::max(0.0L, (sum_sq[c] / N - mean * mean) * N / (N - 1));
    est.value.push_back(static_cast<double>(mean));
    est.standard_error.push_back(static_cast<double>(std::sqrt(var / N)));
  }
  return est;
}

}  // namespace splatir::oracle
