// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/adam.hpp"

#include "splatir/errors.hpp"

#include <cmath>

namespace splatir {

void Adam::update(const std::string& group, std::span<double> params, std::span<const double> grads,
                  double lr) {
  if (params.size() != grads.size()) {
    throw InvalidParameter("adam: parameter and gradient sizes differ for group '" + group + "'");
  }
  if (step_ < 1) throw InvalidParameter("adam: begin_step() not called");
  Moments& mo = groups_[group];
  if (mo.m.empty()) {
    mo.m.assign(params.size(), 0.0);
    mo.v.assign(params.size(), 0.0);
  } else if (mo.m.size() != params.size()) {
    throw InvalidParameter("adam: group '" + group + "' changed size");
  }
  const double b1 = hyper_.beta1, b2 = hyper_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    if (!std::isfinite(g)) {
      ++skipped_;
      continue;
    }
    mo.m[i] = b1 * mo.m[i] + (1.0 - b1) * g;
    mo.v[i] = b2 * mo.v[i] + (1.0 - b2) * g * g;
    const double m_hat = mo.m[i] / c1;
    const double v_hat = mo.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper_.epsilon);
  }
}

}  // namespace splatir
