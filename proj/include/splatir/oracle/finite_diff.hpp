// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace splatir::oracle {

struct NumericGradient {
  std::vector<double> value;
  /// 1 where f was non-finite at a perturbed point; value is 0 there.
  std::vector<unsigned char> flagged;
};

/// Central differences (f(x+h) - f(x-h)) / 2h per scalar parameter, differenced in
/// long double. Requires h in [1e-6, 1e-2]. `params` is restored before returning.
NumericGradient finite_diff_grad(const std::function<double(std::span<const double>)>& loss,
                                 std::span<const double> params, double h);

}  // namespace splatir::oracle
