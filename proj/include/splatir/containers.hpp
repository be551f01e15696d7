// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/brdf.hpp"
#include "splatir/environment.hpp"
#include "splatir/volumes.hpp"

#include <filesystem>

namespace splatir {

/// "GSIRVOL1" container for SH probe grids; layout in docs/formats.md.
void save_volume(const std::filesystem::path& path, const VolumeGrid& grid);
VolumeGrid load_volume(const std::filesystem::path& path);

/// "GSIRLUT1" container for the BRDF table and prefiltered chains.
void save_brdf_lut(const std::filesystem::path& path, const BrdfLut& lut);
BrdfLut load_brdf_lut(const std::filesystem::path& path);
/// Stores the level images only; the loaded chain has no operators.
void save_prefiltered(const std::filesystem::path& path, const PrefilteredEnv& pre);
PrefilteredEnv load_prefiltered(const std::filesystem::path& path);

}  // namespace splatir
