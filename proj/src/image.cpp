// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/image.hpp"

#include "splatir/errors.hpp"

#include <cmath>
#include <string>

namespace splatir {

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw InvalidParameter(std::string(what) + ": shape mismatch (" + std::to_string(a.width) +
                           "x" + std::to_string(a.height) + "x" + std::to_string(a.channels) +
                           " vs " + std::to_string(b.width) + "x" + std::to_string(b.height) +
                           "x" + std::to_string(b.channels) + ")");
  }
}

void require_finite(const Image& img, const char* what) {
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    if (!std::isfinite(img.data[i])) {
      const std::size_t px = i / img.channels;
      throw ParseError(std::string(what) + ": non-finite value at pixel (" +
                       std::to_string(px % img.width) + ", " + std::to_string(px / img.width) +
                       ") channel " + std::to_string(i % img.channels));
    }
  }
}

}  // namespace splatir
