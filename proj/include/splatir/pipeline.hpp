// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/run_config.hpp"
#include "splatir/synth.hpp"

#include <filesystem>
#include <string>

namespace splatir {

/// Writes a synthetic dataset: images/, transforms_train.json (copied to transforms.json),
/// transforms_test.json, gt_normals/, gt_depth/, gt_albedo/, gt_mask/, gt_cloud.ply,
/// init.ply, env_gt.pfm.
void run_synth(SynthKind kind, const SynthParams& params, std::uint64_t seed,
               const std::filesystem::path& out_dir, int lut_resolution = 64,
               int lut_samples = 1024, int workers = 0);

/// Resolves a dataset argument: a JSON file is used as is; a directory selects
/// transforms_{split}.json, falling back to transforms.json.
std::filesystem::path resolve_transforms(const std::string& dataset, const std::string& split);

// Commands. Each writes config.json into cfg.output and throws PreconditionError
// (or ParseError/SchemaError) when an input is missing or unreadable.
void run_fit_geometry(const RunConfig& cfg);
void run_bake(const RunConfig& cfg);
void run_decompose(const RunConfig& cfg);
/// relight = true requires cfg.environment and always shades the color channel with it.
void run_render(const RunConfig& cfg, bool relight);

struct EvalRequest {
  std::string renders;   // directory holding {view}_{channel} files
  std::string dataset;   // synthetic dataset directory (ground truth)
  std::string split = "test";
  std::string image;     // single-image mode: prediction
  std::string target;    // single-image mode: reference
};
/// Metrics as a JSON document.
std::string run_eval(const EvalRequest& req);

}  // namespace splatir
