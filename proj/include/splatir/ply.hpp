// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/gaussian.hpp"

#include <filesystem>

namespace splatir {

/// Raw-parameter defaults for clouds that carry no material properties.
inline constexpr double kDefaultAlbedo = 0.5;
inline constexpr double kDefaultRoughness = 0.9;
inline constexpr double kDefaultMetallic = 1e-4;  // stand-in for 0 in logit space

/// Binary little-endian float32 PLY. The normal group (nx, ny, nz) and the material group
/// (albedo_0..2, roughness, metallic) are optional as whole groups; a partial group is a
/// SchemaError listing the absent names. Missing or all-zero normals are replaced by the
/// shortest scale axis.
GaussianCloud load_gaussian_ply(const std::filesystem::path& path);
void save_gaussian_ply(const std::filesystem::path& path, const GaussianCloud& cloud);

}  // namespace splatir
