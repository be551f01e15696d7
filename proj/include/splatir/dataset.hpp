// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/camera.hpp"
#include "splatir/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace splatir {

struct TrainingView {
  std::string name;
  Camera camera;
  Image target;  // linear RGB
};

struct Dataset {
  std::vector<TrainingView> views;
};

/// Cameras from a transforms JSON plus their PNG targets. RGBA targets are composited over
/// black. Every image must match its camera's resolution.
Dataset load_dataset(const std::filesystem::path& transforms_json);

}  // namespace splatir
