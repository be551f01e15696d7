// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/oracle/finite_diff.hpp"

#include <cmath>
#include <stdexcept>

namespace splatir::oracle {

NumericGradient finite_diff_grad(const std::function<double(std::span<const double>)>& loss,
                                 std::span<const double> params, double h) {
  if (!(h >= 1e-6 && h <= 1e-2)) throw std::invalid_argument("finite_diff_grad: h outside [1e-6, 1e-2]");
  std::vector<double> x(params.begin(), params.end());
  NumericGradient out;
  out.value.assign(x.size(), 0.0);
  out.flagged.assign(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    // Use the step actually representable around x0.
    const double hi = x0 + h;
    const double lo = x0 - h;
    x[i] = hi;
    const long double fp = loss(x);
    x[i] = lo;
    const long double fm = loss(x);
    x[i] = x0;
    if (!std::isfinite(static_cast<double>(fp)) || !std::isfinite(static_cast<double>(fm))) {
      out.flagged[i] = 1;
      continue;
    }
    out.value[i] = static_cast<double>((fp - fm) / (static_cast<long double>(hi) - lo));
  }
  return out;
}

}  // namespace splatir::oracle
