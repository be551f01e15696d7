// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace splatir {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-15;
};

/// Bias-corrected Adam over named parameter groups, each with its own learning rate.
class Adam {
 public:
  explicit Adam(AdamHyper hyper = {}) : hyper_(hyper) {}

  /// Advances the shared step counter; call once per iteration before update().
  void begin_step() { ++step_; }

  /// Updates `params` in place. Entries whose gradient is not finite keep their value and
  /// moments and are counted in skipped().
  void update(const std::string& group, std::span<double> params, std::span<const double> grads,
              double lr);

  std::int64_t step() const { return step_; }
  std::int64_t skipped() const { return skipped_; }
  const AdamHyper& hyper() const { return hyper_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  AdamHyper hyper_;
  std::int64_t step_ = 0;
  std::int64_t skipped_ = 0;
  std::map<std::string, Moments> groups_;
};

}  // namespace splatir
