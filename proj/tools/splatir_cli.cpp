// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line entry point. Flags mirror the RunConfig JSON keys in kebab-case;
// flags given on the command line override values from --config.

#include "splatir/errors.hpp"
#include "splatir/pipeline.hpp"
#include "splatir/run_config.hpp"
#include "splatir/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace splatir;

enum class Kind { kString, kInt, kNumber, kBool, kIntList, kStringList, kNumberList };

struct FlagSpec {
  const char* flag;
  const char* pointer;  // JSON pointer into the config document
  Kind kind;
  const char* help;
};

// Flags shared by the pipeline commands.
const std::vector<FlagSpec>& common_flags() {
  static const std::vector<FlagSpec> k = {
      {"--dataset", "/dataset", Kind::kString, "transforms JSON or dataset directory"},
      {"--output", "/output", Kind::kString, "run directory"},
      {"--cloud", "/cloud", Kind::kString, "input Gaussian PLY"},
      {"--volumes", "/volumes", Kind::kString, "input baked volumes (GSIRVOL1)"},
      {"--environment", "/environment", Kind::kString, "input environment map (PFM)"},
      {"--seed", "/seed", Kind::kInt, "random seed"},
      {"--workers", "/workers", Kind::kInt, "worker threads (0: GSIR_THREADS or all cores)"},
      {"--color-sh-degree", "/color_sh_degree", Kind::kInt, "SH degree of the color model"},
      {"--stage1-iterations", "/stage1_iterations", Kind::kInt, "geometry iterations"},
      {"--stage3-iterations", "/stage3_iterations", Kind::kInt, "material/lighting iterations"},
      {"--lambda-normal-tv", "/lambda_normal_tv", Kind::kNumber, "weight of the normal TV term"},
      {"--lambda-material", "/lambda_material", Kind::kNumber, "weight of the material TV term"},
      {"--lambda-environment", "/lambda_environment", Kind::kNumber,
       "weight of the environment TV term"},
      {"--normal-norm", "/normal_norm", Kind::kString, "normal penalty norm: l1 or l2"},
      {"--train-illumination", "/train_illumination", Kind::kBool,
       "optimize the indirect illumination volume (true/false)"},
      {"--background", "/background", Kind::kNumberList, "background RGB"},
      {"--coverage-threshold", "/coverage_threshold", Kind::kNumber,
       "minimum summed weight for a covered pixel"},
      {"--lr-position", "/learning_rates/position", Kind::kNumber, "learning rate"},
      {"--lr-scale", "/learning_rates/scale", Kind::kNumber, "learning rate"},
      {"--lr-rotation", "/learning_rates/rotation", Kind::kNumber, "learning rate"},
      {"--lr-opacity", "/learning_rates/opacity", Kind::kNumber, "learning rate"},
      {"--lr-sh-dc", "/learning_rates/sh_dc", Kind::kNumber, "learning rate"},
      {"--lr-sh-rest", "/learning_rates/sh_rest", Kind::kNumber, "learning rate"},
      {"--lr-normal", "/learning_rates/normal", Kind::kNumber, "learning rate"},
      {"--lr-albedo", "/learning_rates/albedo", Kind::kNumber, "learning rate"},
      {"--lr-roughness", "/learning_rates/roughness", Kind::kNumber, "learning rate"},
      {"--lr-metallic", "/learning_rates/metallic", Kind::kNumber, "learning rate"},
      {"--lr-environment", "/learning_rates/environment", Kind::kNumber, "learning rate"},
      {"--lr-illumination", "/learning_rates/illumination", Kind::kNumber, "learning rate"},
      {"--adam-beta1", "/adam/beta1", Kind::kNumber, "Adam beta1"},
      {"--adam-beta2", "/adam/beta2", Kind::kNumber, "Adam beta2"},
      {"--adam-epsilon", "/adam/epsilon", Kind::kNumber, "Adam epsilon"},
      {"--bake-grid", "/bake/grid", Kind::kIntList, "probe grid dimensions (3 integers)"},
      {"--bake-tau", "/bake/tau", Kind::kNumber, "occlusion distance threshold"},
      {"--bake-face-resolution", "/bake/face_resolution", Kind::kInt, "cubemap face size"},
      {"--bake-sh-degree", "/bake/sh_degree", Kind::kInt, "SH degree of the volumes"},
      {"--bake-bounds-min", "/bake/bounds_min", Kind::kNumberList, "grid minimum corner"},
      {"--bake-bounds-max", "/bake/bounds_max", Kind::kNumberList, "grid maximum corner"},
      {"--channels", "/render/channels", Kind::kStringList,
       "render channels: color depth normal albedo roughness metallic ao alpha"},
      {"--views", "/render/views", Kind::kIntList, "view indices to render (default all)"},
      {"--lut-resolution", "/lut_resolution", Kind::kInt, "BRDF table resolution"},
      {"--lut-samples", "/lut_samples", Kind::kInt, "samples per BRDF table entry"},
      {"--env-height", "/env_height", Kind::kInt, "environment map rows"},
      {"--env-width", "/env_width", Kind::kInt, "environment map columns"},
      {"--env-init", "/env_init", Kind::kNumber, "initial environment radiance"},
  };
  return k;
}

struct Overrides {
  std::map<std::string, std::string> scalars;  // flag -> raw text
  std::map<std::string, std::vector<std::string>> lists;
};

json convert(const std::string& text, Kind kind, const std::string& flag) {
  try {
    switch (kind) {
      case Kind::kString:
      case Kind::kStringList: return text;
      case Kind::kInt:
      case Kind::kIntList: {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) break;
        return v;
      }
      case Kind::kNumber:
      case Kind::kNumberList: {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) break;
        return v;
      }
      case Kind::kBool:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        break;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid value '" + text + "' for " + flag);
}

void add_common_flags(CLI::App* cmd, Overrides& ov, const char* depth_pointer) {
  cmd->add_option("--config", ov.scalars["--config"], "JSON run config; flags override it");
  for (const FlagSpec& f : common_flags()) {
    const bool list = f.kind == Kind::kIntList || f.kind == Kind::kStringList ||
                      f.kind == Kind::kNumberList;
    if (list) {
      cmd->add_option(f.flag, ov.lists[f.flag], f.help);
    } else {
      cmd->add_option(f.flag, ov.scalars[f.flag], f.help);
    }
  }
  ov.scalars["--depth-mode"];
  cmd->add_option("--depth-mode", ov.scalars["--depth-mode"],
                  std::string("depth mode: vol_accum, peak or linear (") + depth_pointer + ")");
}

RunConfig build_config(CLI::App* cmd, const Overrides& ov, const char* depth_pointer) {
  json doc = json::object();
  const std::string& path = ov.scalars.at("--config");
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  }
  auto set = [&](const char* pointer, json value) {
    doc[json::json_pointer(pointer)] = std::move(value);
  };
  for (const FlagSpec& f : common_flags()) {
    if (cmd->count(f.flag) == 0) continue;
    if (f.kind == Kind::kIntList || f.kind == Kind::kNumberList || f.kind == Kind::kStringList) {
      json arr = json::array();
      for (const std::string& s : ov.lists.at(f.flag)) arr.push_back(convert(s, f.kind, f.flag));
      set(f.pointer, arr);
    } else {
      set(f.pointer, convert(ov.scalars.at(f.flag), f.kind, f.flag));
    }
  }
  if (cmd->count("--depth-mode")) set(depth_pointer, ov.scalars.at("--depth-mode"));
  return parse_run_config(doc.dump());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splatir: Gaussian splatting inverse rendering pipeline"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every command");

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset with ground truth");
  std::string kind = "sphere", synth_out;
  SynthParams sp;
  std::uint64_t synth_seed = 0;
  int synth_workers = 0, synth_lut_res = 64, synth_lut_samples = 1024;
  synth->add_option("--kind", kind, "scene kind: sphere, box or shell")->capture_default_str();
  synth->add_option("--output", synth_out, "dataset directory")->required();
  synth->add_option("--seed", synth_seed, "random seed")->capture_default_str();
  synth->add_option("--count", sp.count, "number of Gaussians")->capture_default_str();
  synth->add_option("--radius", sp.radius, "object radius / half extent")->capture_default_str();
  synth->add_option("--thickness", sp.thickness, "shell thickness")->capture_default_str();
  synth->add_option("--views", sp.views, "training views")->capture_default_str();
  synth->add_option("--test-views", sp.test_views, "held-out views")->capture_default_str();
  synth->add_option("--width", sp.width, "image width")->capture_default_str();
  synth->add_option("--height", sp.height, "image height")->capture_default_str();
  synth->add_option("--fov-x", sp.fov_x, "horizontal field of view, radians")->capture_default_str();
  synth->add_option("--camera-distance", sp.camera_distance, "orbit radius")->capture_default_str();
  synth->add_option("--workers", synth_workers, "worker threads")->capture_default_str();
  synth->add_option("--lut-resolution", synth_lut_res, "BRDF table resolution")->capture_default_str();
  synth->add_option("--lut-samples", synth_lut_samples, "samples per BRDF table entry")
      ->capture_default_str();

  struct Command {
    CLI::App* app;
    Overrides ov;
    const char* depth_pointer;
  };
  std::map<std::string, Command> commands;
  const std::vector<std::tuple<const char*, const char*, const char*>> pipeline = {
      {"fit-geometry", "fit Gaussian geometry and normals to the training views", "/depth_mode"},
      {"bake", "bake occlusion and indirect illumination volumes", "/depth_mode"},
      {"decompose", "recover materials and lighting (needs baked volumes)", "/depth_mode"},
      {"render", "render color, depth, normal, material and AO channels", "/render/depth_mode"},
      {"relight", "re-render under a new environment map", "/render/depth_mode"},
  };
  for (const auto& [name, help, depth] : pipeline) {
    Command& c = commands[name];
    c.app = app.add_subcommand(name, help);
    c.depth_pointer = depth;
    add_common_flags(c.app, c.ov, depth);
  }

  auto* eval = app.add_subcommand("eval", "print PSNR / SSIM / normal MAE as JSON");
  EvalRequest req;
  eval->add_option("--renders", req.renders, "render directory ({view}_{channel} files)");
  eval->add_option("--dataset", req.dataset, "synthetic dataset directory");
  eval->add_option("--split", req.split, "dataset split")->capture_default_str();
  eval->add_option("--image", req.image, "single-image mode: prediction (PNG or PFM)");
  eval->add_option("--target", req.target, "single-image mode: reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      run_synth(parse_synth_kind(kind), sp, synth_seed, synth_out, synth_lut_res,
                synth_lut_samples, synth_workers);
      return 0;
    }
    if (eval->parsed()) {
      std::cout << run_eval(req) << "\n";
      return 0;
    }
    for (auto& [name, c] : commands) {
      if (!c.app->parsed()) continue;
      const RunConfig cfg = build_config(c.app, c.ov, c.depth_pointer);
      if (name == "fit-geometry") run_fit_geometry(cfg);
      else if (name == "bake") run_bake(cfg);
      else if (name == "decompose") run_decompose(cfg);
      else if (name == "render") run_render(cfg, false);
      else if (name == "relight") run_render(cfg, true);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
