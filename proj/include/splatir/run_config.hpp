// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/stages.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace splatir {

/// Malformed or unknown configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BakeOptions {
  std::array<int, 3> grid{16, 16, 16};
  std::optional<double> tau;  // default: 0.1 * scene diagonal
  int face_resolution = 64;
  int sh_degree = 2;
  std::optional<Vec3> bounds_min;  // default: cloud bounds inflated by 5%
  std::optional<Vec3> bounds_max;
};

struct RenderOptions {
  DepthMode depth_mode = DepthMode::kLinear;
  std::vector<std::string> channels{"color", "depth", "normal", "albedo", "roughness", "metallic", "ao"};
  std::vector<int> views;  // empty: all
};

struct RunConfig {
  std::string dataset;      // transforms JSON, or a directory holding transforms_train.json
  std::string output;       // run directory
  std::string cloud;        // input PLY (init for fit-geometry, fitted cloud otherwise)
  std::string volumes;      // input GSIRVOL1 file
  std::string environment;  // input environment PFM (lat-long, linear radiance)
  std::uint64_t seed = 0;
  int workers = 0;
  int color_sh_degree = 3;
  StageSchedule schedule;
  BakeOptions bake;
  RenderOptions render;
  int lut_resolution = 64;
  int lut_samples = 1024;
  int env_height = 16;
  int env_width = 32;
  double env_init = 0.5;  // initial environment radiance for stage 3
};

/// Parses a JSON object; unknown keys and wrong types raise ConfigError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Full config as pretty-printed JSON (every key, defaults included).
std::string run_config_to_json(const RunConfig& cfg);

/// Channel names accepted by the render options.
const std::vector<std::string>& known_render_channels();

}  // namespace splatir
