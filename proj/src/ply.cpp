// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/ply.hpp"

#include "splatir/errors.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace splatir {
namespace {

struct Property {
  std::string name;
  int size;  // 4 (float) or 8 (double)
};

std::vector<std::string> property_names(int sh_degree) {
  std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"};
  const int rest = 3 * (sh_coeff_count(sh_degree) - 1);
  for (int i = 0; i < rest; ++i) names.push_back("f_rest_" + std::to_string(i));
  for (const char* n : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2",
                        "rot_3", "albedo_0", "albedo_1", "albedo_2", "roughness", "metallic"}) {
    names.emplace_back(n);
  }
  return names;
}

int type_size(const std::string& type) {
  if (type == "float" || type == "float32") return 4;
  if (type == "double" || type == "float64") return 8;
  return 0;
}

}  // namespace

void save_gaussian_ply(const std::filesystem::path& path, const GaussianCloud& cloud) {
  if (cloud.sh_degree < 0 || cloud.sh_degree > kMaxShDegree) {
    throw InvalidParameter("PLY: SH degree must be in [0, 3]");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path.string());
  const auto names = property_names(cloud.sh_degree);
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size() << "\n";
  for (const auto& n : names) out << "property float " << n << "\n";
  out << "end_header\n";

  const int k = sh_coeff_count(cloud.sh_degree);
  std::vector<float> row;
  row.reserve(names.size());
  for (const Gaussian& g : cloud.gaussians) {
    row.clear();
    for (int i = 0; i < 3; ++i) row.push_back(static_cast<float>(g.position[i]));
    for (int i = 0; i < 3; ++i) row.push_back(static_cast<float>(g.normal[i]));
    for (int c = 0; c < 3; ++c) row.push_back(static_cast<float>(g.sh[0][c]));
    for (int c = 0; c < 3; ++c) {
      for (int j = 1; j < k; ++j) row.push_back(static_cast<float>(g.sh[j][c]));
    }
    row.push_back(static_cast<float>(g.opacity_logit));
    for (int i = 0; i < 3; ++i) row.push_back(static_cast<float>(g.log_scale[i]));
    for (int i = 0; i < 4; ++i) row.push_back(static_cast<float>(g.rotation[i]));
    for (int i = 0; i < 3; ++i) row.push_back(static_cast<float>(g.albedo_logit[i]));
    row.push_back(static_cast<float>(g.roughness_logit));
    row.push_back(static_cast<float>(g.metallic_logit));
    // x86 and aarch64 are little-endian; the format is fixed to that byte order.
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw PreconditionError("failed writing " + path.string());
}

GaussianCloud load_gaussian_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "ply") throw ParseError(path.string() + ": not a PLY file");

  std::size_t count = 0;
  bool in_vertex = false, seen_vertex = false;
  std::vector<Property> props;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "end_header") break;
    if (word == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "binary_little_endian") {
        throw ParseError(path.string() + ": only binary_little_endian PLY is supported");
      }
    } else if (word == "element") {
      std::string name;
      ss >> name;
      if (name == "vertex") {
        if (seen_vertex) throw ParseError(path.string() + ": duplicate vertex element");
        ss >> count;
        in_vertex = seen_vertex = true;
      } else {
        if (seen_vertex) break;  // trailing elements are ignored
        throw ParseError(path.string() + ": unexpected element '" + name + "' before vertex");
      }
    } else if (word == "property" && in_vertex) {
      std::string type, name;
      ss >> type >> name;
      if (type == "list") throw ParseError(path.string() + ": list properties are not supported");
      const int size = type_size(type);
      if (size == 0) {
        throw ParseError(path.string() + ": property '" + name + "' has unsupported type " + type);
      }
      props.push_back({name, size});
    }
  }
  if (line != "end_header") {
    // Skip the remaining header if we stopped early at a trailing element.
    while (line != "end_header" && std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
    }
    if (line != "end_header") throw ParseError(path.string() + ": missing end_header");
  }
  if (!seen_vertex) throw SchemaError(path.string() + ": no vertex element");

  std::map<std::string, std::size_t> offset;
  std::size_t stride = 0;
  for (const Property& p : props) {
    offset[p.name] = stride;
    stride += p.size;
  }
  std::map<std::string, int> size_of;
  for (const Property& p : props) size_of[p.name] = p.size;

  auto missing = [&](const std::vector<std::string>& names) {
    std::vector<std::string> absent;
    for (const auto& n : names) {
      if (!offset.count(n)) absent.push_back(n);
    }
    return absent;
  };
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& n : v) s += (s.empty() ? "" : ", ") + n;
    return s;
  };

  const std::vector<std::string> required = {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2",
                                             "opacity", "scale_0", "scale_1", "scale_2",
                                             "rot_0", "rot_1", "rot_2", "rot_3"};
  const std::vector<std::string> normal_group = {"nx", "ny", "nz"};
  const std::vector<std::string> material_group = {"albedo_0", "albedo_1", "albedo_2",
                                                   "roughness", "metallic"};
  if (auto absent = missing(required); !absent.empty()) {
    throw SchemaError(path.string() + ": missing required properties: " + join(absent));
  }
  const auto absent_normal = missing(normal_group);
  const auto absent_material = missing(material_group);
  if (!absent_normal.empty() && absent_normal.size() != normal_group.size()) {
    throw SchemaError(path.string() + ": incomplete normal properties, missing: " +
                      join(absent_normal));
  }
  if (!absent_material.empty() && absent_material.size() != material_group.size()) {
    throw SchemaError(path.string() + ": incomplete material properties, missing: " +
                      join(absent_material));
  }
  const bool has_normal = absent_normal.empty();
  const bool has_material = absent_material.empty();

  int rest = 0;
  while (offset.count("f_rest_" + std::to_string(rest))) ++rest;
  GaussianCloud cloud;
  if (rest % 3 != 0) throw SchemaError(path.string() + ": f_rest count is not a multiple of 3");
  const int k = rest / 3 + 1;
  cloud.sh_degree = -1;
  for (int d = 0; d <= kMaxShDegree; ++d) {
    if (sh_coeff_count(d) == k) cloud.sh_degree = d;
  }
  if (cloud.sh_degree < 0) {
    throw SchemaError(path.string() + ": f_rest count " + std::to_string(rest) +
                      " does not match an SH degree in [0, 3]");
  }

  std::vector<char> data(count * stride);
  in.read(data.data(), static_cast<std::streamsize>(data.size()));
  if (static_cast<std::size_t>(in.gcount()) != data.size()) {
    throw ParseError(path.string() + ": truncated vertex data");
  }

  cloud.gaussians.resize(count);
  for (std::size_t v = 0; v < count; ++v) {
    const char* base = data.data() + v * stride;
    auto get = [&](const std::string& name) {
      double value;
      const char* p = base + offset.at(name);
      if (size_of.at(name) == 4) {
        float f;
        std::memcpy(&f, p, 4);
        value = f;
      } else {
        std::memcpy(&value, p, 8);
      }
      if (!std::isfinite(value)) {
        throw ParseError(path.string() + ": non-finite value in vertex " + std::to_string(v) +
                         " property '" + name + "'");
      }
      return value;
    };
    Gaussian& g = cloud.gaussians[v];
    g.position = Vec3(get("x"), get("y"), get("z"));
    for (int c = 0; c < 3; ++c) g.sh[0][c] = get("f_dc_" + std::to_string(c));
    for (int c = 0; c < 3; ++c) {
      for (int j = 1; j < k; ++j) g.sh[j][c] = get("f_rest_" + std::to_string(c * (k - 1) + j - 1));
    }
    g.opacity_logit = get("opacity");
    g.log_scale = Vec3(get("scale_0"), get("scale_1"), get("scale_2"));
    g.rotation = Vec4(get("rot_0"), get("rot_1"), get("rot_2"), get("rot_3"));
    if (has_normal) g.normal = Vec3(get("nx"), get("ny"), get("nz"));
    if (!has_normal || g.normal.isZero(0.0)) {
      if (!(g.rotation.norm() > 0.0)) {
        throw ParseError(path.string() + ": zero quaternion in vertex " + std::to_string(v));
      }
      g.normal = shortest_axis(g);
    }
    if (has_material) {
      g.albedo_logit = Vec3(get("albedo_0"), get("albedo_1"), get("albedo_2"));
      g.roughness_logit = get("roughness");
      g.metallic_logit = get("metallic");
    } else {
      g.albedo_logit = Vec3::Constant(logit(kDefaultAlbedo));
      g.roughness_logit = logit(kDefaultRoughness);
      g.metallic_logit = logit(kDefaultMetallic);
    }
  }
  return cloud;
}

}  // namespace splatir
