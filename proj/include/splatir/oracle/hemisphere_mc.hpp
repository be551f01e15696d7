// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/math.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace splatir::oracle {

struct McEstimate {
  std::vector<double> value;
  std::vector<double> standard_error;
  std::size_t count = 0;
};

/// Integrand over incoming directions; returns one value per output channel.
using HemisphereIntegrand = std::function<std::vector<double>(const Vec3& l)>;

/// Estimates the integral of f(l) * max(0, l.n) over the hemisphere around n with
/// cosine-weighted samples (concentric disk mapping). Deterministic per seed.
/// Requires samples >= 1024.
McEstimate oracle_hemisphere_mc(const HemisphereIntegrand& f, const Vec3& n,
                                std::size_t samples, std::uint64_t seed);

/// Concentric mapping of (u1, u2) in [0,1)^2 to a cosine-distributed direction around +z.
Vec3 cosine_sample_local(double u1, double u2);

}  // namespace splatir::oracle
