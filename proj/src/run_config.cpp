// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/run_config.hpp"

#include "splatir/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace splatir {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + key + "' has the wrong type");
  }
}

void read_number(const json& obj, const char* key, double& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number()) throw ConfigError("config key '" + where + key + "' must be a number");
  out = obj.at(key).get<double>();
}

void read_int(const json& obj, const char* key, int& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number_integer()) {
    throw ConfigError("config key '" + where + key + "' must be an integer");
  }
  out = obj.at(key).get<int>();
}

Vec3 read_vec3(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
    throw ConfigError("config key '" + name + "' must be an array of 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

const std::vector<std::string>& known_render_channels() {
  static const std::vector<std::string> k = {"color", "depth",     "normal",   "albedo",
                                             "roughness", "metallic", "ao", "alpha"};
  return k;
}

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"dataset", "output", "cloud", "volumes", "environment", "seed", "workers", "color_sh_degree", "stage1_iterations",
                  "stage3_iterations", "lambda_normal_tv", "lambda_material", "lambda_environment",
                  "learning_rates", "adam", "depth_mode", "normal_norm", "train_illumination",
                  "background", "coverage_threshold", "bake", "render", "lut_resolution",
                  "lut_samples", "env_height", "env_width", "env_init"},
                 "");
  RunConfig cfg;
  StageSchedule& s = cfg.schedule;
  read(doc, "dataset", cfg.dataset, "");
  read(doc, "output", cfg.output, "");
  read(doc, "cloud", cfg.cloud, "");
  read(doc, "volumes", cfg.volumes, "");
  read(doc, "environment", cfg.environment, "");
  read(doc, "seed", cfg.seed, "");
  read_int(doc, "workers", cfg.workers, "");
  read_int(doc, "color_sh_degree", cfg.color_sh_degree, "");
  read_int(doc, "stage1_iterations", s.stage1_iterations, "");
  read_int(doc, "stage3_iterations", s.stage3_iterations, "");
  read_number(doc, "lambda_normal_tv", s.lambda_normal_tv, "");
  read_number(doc, "lambda_material", s.lambda_material, "");
  read_number(doc, "lambda_environment", s.lambda_environment, "");
  read(doc, "train_illumination", s.train_illumination, "");
  read_number(doc, "coverage_threshold", s.raster.coverage_threshold, "");
  read_int(doc, "lut_resolution", cfg.lut_resolution, "");
  read_int(doc, "lut_samples", cfg.lut_samples, "");
  read_int(doc, "env_height", cfg.env_height, "");
  read_int(doc, "env_width", cfg.env_width, "");
  read_number(doc, "env_init", cfg.env_init, "");
  if (doc.contains("background")) s.raster.background = read_vec3(doc["background"], "background");
  if (doc.contains("depth_mode")) {
    std::string m;
    read(doc, "depth_mode", m, "");
    try {
      s.depth_mode = parse_depth_mode(m);
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("normal_norm")) {
    std::string m;
    read(doc, "normal_norm", m, "");
    if (m == "l1") s.normal_norm = PenaltyNorm::kL1;
    else if (m == "l2") s.normal_norm = PenaltyNorm::kL2;
    else throw ConfigError("normal_norm must be 'l1' or 'l2'");
  }
  if (doc.contains("learning_rates")) {
    const json& lr = doc["learning_rates"];
    const std::string w = "learning_rates.";
    reject_unknown(lr, {"position", "scale", "rotation", "opacity", "sh_dc", "sh_rest", "normal",
                        "albedo", "roughness", "metallic", "environment", "illumination"},
                   w);
    read_number(lr, "position", s.lr.position, w);
    read_number(lr, "scale", s.lr.scale, w);
    read_number(lr, "rotation", s.lr.rotation, w);
    read_number(lr, "opacity", s.lr.opacity, w);
    read_number(lr, "sh_dc", s.lr.sh_dc, w);
    read_number(lr, "sh_rest", s.lr.sh_rest, w);
    read_number(lr, "normal", s.lr.normal, w);
    read_number(lr, "albedo", s.lr.albedo, w);
    read_number(lr, "roughness", s.lr.roughness, w);
    read_number(lr, "metallic", s.lr.metallic, w);
    read_number(lr, "environment", s.lr.environment, w);
    read_number(lr, "illumination", s.lr.illumination, w);
  }
  if (doc.contains("adam")) {
    const json& a = doc["adam"];
    reject_unknown(a, {"beta1", "beta2", "epsilon"}, "adam.");
    read_number(a, "beta1", s.adam.beta1, "adam.");
    read_number(a, "beta2", s.adam.beta2, "adam.");
    read_number(a, "epsilon", s.adam.epsilon, "adam.");
  }
  if (doc.contains("bake")) {
    const json& b = doc["bake"];
    const std::string w = "bake.";
    reject_unknown(b, {"grid", "tau", "face_resolution", "sh_degree", "bounds_min", "bounds_max"}, w);
    if (b.contains("grid")) {
      const json& g = b["grid"];
      if (!g.is_array() || g.size() != 3 || !g[0].is_number_integer() ||
          !g[1].is_number_integer() || !g[2].is_number_integer()) {
        throw ConfigError("config key 'bake.grid' must be an array of 3 integers");
      }
      for (int i = 0; i < 3; ++i) cfg.bake.grid[i] = g[i].get<int>();
    }
    if (b.contains("tau")) {
      double t = 0.0;
      read_number(b, "tau", t, w);
      cfg.bake.tau = t;
    }
    read_int(b, "face_resolution", cfg.bake.face_resolution, w);
    read_int(b, "sh_degree", cfg.bake.sh_degree, w);
    if (b.contains("bounds_min")) cfg.bake.bounds_min = read_vec3(b["bounds_min"], "bake.bounds_min");
    if (b.contains("bounds_max")) cfg.bake.bounds_max = read_vec3(b["bounds_max"], "bake.bounds_max");
  }
  if (doc.contains("render")) {
    const json& r = doc["render"];
    reject_unknown(r, {"depth_mode", "channels", "views"}, "render.");
    if (r.contains("depth_mode")) {
      std::string m;
      read(r, "depth_mode", m, "render.");
      try {
        cfg.render.depth_mode = parse_depth_mode(m);
      } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
      }
    }
    read(r, "channels", cfg.render.channels, "render.");
    read(r, "views", cfg.render.views, "render.");
    for (const auto& c : cfg.render.channels) {
      const auto& known = known_render_channels();
      if (std::find(known.begin(), known.end(), c) == known.end()) {
        throw ConfigError("unknown render channel '" + c + "'");
      }
    }
  }
  try {
    s.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  if (cfg.color_sh_degree < 0 || cfg.color_sh_degree > kMaxShDegree) {
    throw ConfigError("color_sh_degree must be in [0, 3]");
  }
  if (cfg.bake.sh_degree < 0 || cfg.bake.sh_degree > kMaxShDegree) {
    throw ConfigError("bake.sh_degree must be in [0, 3]");
  }
  if (cfg.bake.grid[0] < 2 || cfg.bake.grid[1] < 2 || cfg.bake.grid[2] < 2 ||
      cfg.bake.face_resolution < 1) {
    throw ConfigError("bake.grid entries must be >= 2 and face_resolution >= 1");
  }
  if (cfg.bake.tau && !(*cfg.bake.tau > 0.0)) throw ConfigError("bake.tau must be positive");
  if (cfg.lut_resolution < 16 || cfg.lut_samples < 1) {
    throw ConfigError("lut_resolution must be >= 16 and lut_samples >= 1");
  }
  if (cfg.env_height < 2 || cfg.env_width < 2 || !(cfg.env_init > 0.0)) {
    throw ConfigError("environment must be at least 2x2 with a positive initial radiance");
  }
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
  if (!(s.raster.coverage_threshold > 0.0)) throw ConfigError("coverage_threshold must be positive");
  s.seed = cfg.seed;
  s.raster.workers = cfg.workers;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
  const StageSchedule& s = cfg.schedule;
  ordered_json j;
  j["dataset"] = cfg.dataset;
  j["output"] = cfg.output;
  j["cloud"] = cfg.cloud;
  j["volumes"] = cfg.volumes;
  j["environment"] = cfg.environment;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["color_sh_degree"] = cfg.color_sh_degree;
  j["stage1_iterations"] = s.stage1_iterations;
  j["stage3_iterations"] = s.stage3_iterations;
  j["lambda_normal_tv"] = s.lambda_normal_tv;
  j["lambda_material"] = s.lambda_material;
  j["lambda_environment"] = s.lambda_environment;
  j["learning_rates"] = {{"position", s.lr.position},   {"scale", s.lr.scale},
                         {"rotation", s.lr.rotation},   {"opacity", s.lr.opacity},
                         {"sh_dc", s.lr.sh_dc},         {"sh_rest", s.lr.sh_rest},
                         {"normal", s.lr.normal},       {"albedo", s.lr.albedo},
                         {"roughness", s.lr.roughness}, {"metallic", s.lr.metallic},
                         {"environment", s.lr.environment}, {"illumination", s.lr.illumination}};
  j["adam"] = {{"beta1", s.adam.beta1}, {"beta2", s.adam.beta2}, {"epsilon", s.adam.epsilon}};
  j["depth_mode"] = std::string(to_string(s.depth_mode));
  j["normal_norm"] = s.normal_norm == PenaltyNorm::kL1 ? "l1" : "l2";
  j["train_illumination"] = s.train_illumination;
  j["background"] = {s.raster.background.x(), s.raster.background.y(), s.raster.background.z()};
  j["coverage_threshold"] = s.raster.coverage_threshold;
  ordered_json b;
  b["grid"] = cfg.bake.grid;
  if (cfg.bake.tau) b["tau"] = *cfg.bake.tau;
  b["face_resolution"] = cfg.bake.face_resolution;
  b["sh_degree"] = cfg.bake.sh_degree;
  if (cfg.bake.bounds_min) b["bounds_min"] = {cfg.bake.bounds_min->x(), cfg.bake.bounds_min->y(), cfg.bake.bounds_min->z()};
  if (cfg.bake.bounds_max) b["bounds_max"] = {cfg.bake.bounds_max->x(), cfg.bake.bounds_max->y(), cfg.bake.bounds_max->z()};
  j["bake"] = b;
  j["render"] = {{"depth_mode", std::string(to_string(cfg.render.depth_mode))},
                 {"channels", cfg.render.channels},
                 {"views", cfg.render.views}};
  j["lut_resolution"] = cfg.lut_resolution;
  j["lut_samples"] = cfg.lut_samples;
  j["env_height"] = cfg.env_height;
  j["env_width"] = cfg.env_width;
  j["env_init"] = cfg.env_init;
  return j.dump(2) + "\n";
}

}  // namespace splatir
