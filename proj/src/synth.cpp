// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/synth.hpp"

#include "splatir/errors.hpp"
#include "splatir/ply.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace splatir {

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kSphere: return "sphere";
    case SynthKind::kBox: return "box";
    case SynthKind::kShell: return "shell";
  }
  return "sphere";
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "sphere") return SynthKind::kSphere;
  if (name == "box") return SynthKind::kBox;
  if (name == "shell") return SynthKind::kShell;
  throw InvalidParameter("unknown scene kind '" + std::string(name) +
                         "' (expected sphere, box or shell)");
}

Vec3 sky_radiance(const Vec3& dir) {
  const Vec3 d = dir.normalized();
  const Vec3 sun = Vec3(0.4, 0.3, 0.85).normalized();
  const double t = 0.5 + 0.5 * d.z();
  const Vec3 sky = (1.0 - t) * Vec3(0.35, 0.3, 0.25) + t * Vec3(0.6, 0.75, 1.0);
  const double lobe = std::pow(std::max(0.0, d.dot(sun)), 8.0);
  return sky + 1.5 * lobe * Vec3(1.0, 0.9, 0.7);
}

namespace {

std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> pts(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts[i] = Vec3(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

/// Rotation whose third column is n.
Vec4 frame_quaternion(const Vec3& n, double twist) {
  const Vec3 t0 = n.unitOrthogonal();
  const Vec3 b0 = n.cross(t0);
  const Vec3 t = std::cos(twist) * t0 + std::sin(twist) * b0;
  Mat3 r;
  r.col(0) = t;
  r.col(1) = n.cross(t);
  r.col(2) = n;
  return matrix_to_quaternion(r);
}

Gaussian make_disc(const Vec3& p, const Vec3& n, double size, const SynthParams& prm,
                   const Material& mat, double twist) {
  Gaussian g;
  g.position = p;
  g.normal = n;
  g.rotation = frame_quaternion(n, twist);
  g.log_scale = Vec3(std::log(size), std::log(size), std::log(size * prm.disc_flatness));
  g.opacity_logit = logit(prm.opacity);
  g.albedo_logit = Vec3(logit(mat.albedo.x()), logit(mat.albedo.y()), logit(mat.albedo.z()));
  g.roughness_logit = logit(mat.roughness);
  g.metallic_logit = logit(std::max(mat.metallic, kDefaultMetallic));
  // Mid-gray-ish SH color from the albedo; stage 1 fits the real appearance.
  constexpr double kY00 = 0.28209479177387814;
  for (int c = 0; c < 3; ++c) g.sh[0][c] = (mat.albedo[c] - 0.5) / kY00;
  return g;
}

std::vector<Camera> orbit_cameras(int count, double offset, const SynthParams& prm) {
  std::vector<Camera> cams;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    // Latitudes in [-60, 70] degrees so no camera looks straight along the up axis.
    const double z = -0.85 + 1.8 * (i + offset) / std::max(count, 1);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i + offset * 2.0;
    const Vec3 eye = prm.camera_distance * Vec3(r * std::cos(phi), r * std::sin(phi), z);
    cams.push_back(look_at(eye, Vec3::Zero(), Vec3::UnitZ(), prm.width, prm.height, prm.fov_x,
                           0.01, 100.0));
  }
  return cams;
}

std::optional<double> ray_sphere(const Vec3& o, const Vec3& d, double r) {
  const double b = o.dot(d);
  const double c = o.squaredNorm() - r * r;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double t0 = -b - s, t1 = -b + s;
  if (t0 > 1e-9) return t0;
  if (t1 > 1e-9) return t1;
  return std::nullopt;
}

}  // namespace

Material SynthScene::material_at(const Vec3& point) const {
  const Vec3 q = point / params.radius;
  Material m;
  m.albedo = Vec3(0.55 + 0.3 * std::sin(2.5 * q.x() + 0.3), 0.45 + 0.25 * std::cos(2.0 * q.y()),
                  0.35 + 0.2 * std::sin(1.7 * q.z() + 1.0));
  m.roughness = std::clamp(0.55 + 0.3 * q.z(), 0.2, 0.9);
  m.metallic = 0.0;
  return m;
}

std::optional<SurfaceHit> SynthScene::intersect(const Camera& cam, int px, int py) const {
  const Mat3 Rt = cam.rotation().transpose();
  const Vec3 o = cam.center();
  const Vec3 d = (Rt * cam.unproject(px + 0.5, py + 0.5, 1.0)).normalized();
  std::optional<double> t;
  Vec3 normal;
  const double r = params.radius;
  if (kind == SynthKind::kBox) {
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    int axis = -1;
    for (int a = 0; a < 3; ++a) {
      if (std::abs(d[a]) < 1e-15) {
        if (std::abs(o[a]) > r) return std::nullopt;
        continue;
      }
      double ta = (-r - o[a]) / d[a], tb = (r - o[a]) / d[a];
      if (ta > tb) std::swap(ta, tb);
      if (ta > t_near) {
        t_near = ta;
        axis = a;
      }
      t_far = std::min(t_far, tb);
    }
    if (t_near > t_far || t_near <= 1e-9 || axis < 0) return std::nullopt;
    t = t_near;
    normal = Vec3::Zero();
    normal[axis] = d[axis] > 0.0 ? -1.0 : 1.0;
  } else {
    t = ray_sphere(o, d, r);
    if (!t) return std::nullopt;
    normal = (o + *t * d) / r;
  }
  SurfaceHit hit;
  hit.point = o + *t * d;
  hit.normal = normal;
  hit.depth = cam.to_camera(hit.point).z();
  return hit;
}

SynthScene synth_scene(SynthKind kind, const SynthParams& prm, std::uint64_t seed) {
  if (prm.count < 8) throw InvalidParameter("synth: need at least 8 Gaussians");
  if (!(prm.radius > 0.0) || !(prm.opacity > 0.0 && prm.opacity < 1.0) ||
      !(prm.disc_flatness > 0.0 && prm.disc_flatness <= 1.0)) {
    throw InvalidParameter("synth: radius must be positive, opacity in (0, 1), flatness in (0, 1]");
  }
  if (prm.camera_distance <= prm.radius * 1.2) {
    throw InvalidParameter("synth: cameras must sit outside the object");
  }
  if (prm.sh_degree < 0 || prm.sh_degree > kMaxShDegree || prm.views < 1 || prm.width < 1 ||
      prm.height < 1 || prm.test_views < 0) {
    throw InvalidParameter("synth: invalid degree, view count or resolution");
  }
  if (kind == SynthKind::kShell && !(prm.thickness > 0.0 && prm.thickness < prm.radius)) {
    throw InvalidParameter("synth: shell thickness must be in (0, radius)");
  }
  SynthScene scene;
  scene.kind = kind;
  scene.params = prm;
  scene.cloud.sh_degree = prm.sh_degree;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> twist(0.0, 2.0 * kPi);

  auto add_sphere_layer = [&](int n, double r, bool inward) {
    const double spacing = std::sqrt(4.0 * kPi * r * r / n);
    for (const Vec3& u : fibonacci_sphere(n)) {
      const Vec3 p = r * u;
      scene.cloud.gaussians.push_back(
          make_disc(p, inward ? Vec3(-u) : u, 0.6 * spacing, prm, scene.material_at(p), twist(rng)));
    }
  };

  switch (kind) {
    case SynthKind::kSphere:
      add_sphere_layer(prm.count, prm.radius, false);
      break;
    case SynthKind::kShell: {
      const double inner = prm.radius - prm.thickness;
      const double ro2 = prm.radius * prm.radius, ri2 = inner * inner;
      const int n_outer = std::max(4, static_cast<int>(std::lround(prm.count * ro2 / (ro2 + ri2))));
      add_sphere_layer(n_outer, prm.radius, false);
      add_sphere_layer(std::max(4, prm.count - n_outer), inner, true);
      break;
    }
    case SynthKind::kBox: {
      const int per_face = std::max(2, static_cast<int>(std::lround(std::sqrt(prm.count / 6.0))));
      const double r = prm.radius;
      const double step = 2.0 * r / per_face;
      for (int axis = 0; axis < 3; ++axis) {
        for (int sign = -1; sign <= 1; sign += 2) {
          Vec3 n = Vec3::Zero();
          n[axis] = sign;
          const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
          for (int i = 0; i < per_face; ++i) {
            for (int j = 0; j < per_face; ++j) {
              Vec3 p = n * r;
              p[a1] = -r + (i + 0.5) * step;
              p[a2] = -r + (j + 0.5) * step;
              scene.cloud.gaussians.push_back(
                  make_disc(p, n, 0.6 * step, prm, scene.material_at(p), twist(rng)));
            }
          }
        }
      }
      break;
    }
  }

  Image sky(prm.env_width, prm.env_height, 3);
  EnvironmentMap probe(prm.env_height, prm.env_width);
  for (int row = 0; row < prm.env_height; ++row) {
    for (int col = 0; col < prm.env_width; ++col) {
      const Vec3 rad = sky_radiance(probe.texel_direction(row, col));
      for (int c = 0; c < 3; ++c) sky.at(col, row, c) = rad[c];
    }
  }
  scene.env = EnvironmentMap::from_radiance(sky);
  scene.train_cameras = orbit_cameras(prm.views, 0.0, prm);
  scene.test_cameras = orbit_cameras(prm.test_views, 0.5, prm);
  return scene;
}

GroundTruthMaps ground_truth_maps(const SynthScene& scene, const Camera& cam) {
  GroundTruthMaps m{Image(cam.width, cam.height, 1, cam.far), Image(cam.width, cam.height, 3),
                    Image(cam.width, cam.height, 3),
                    Mask(static_cast<std::size_t>(cam.width) * cam.height, 0)};
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const auto hit = scene.intersect(cam, x, y);
      if (!hit) continue;
      m.mask[static_cast<std::size_t>(y) * cam.width + x] = 1;
      m.depth.at(x, y) = hit->depth;
      const Material mat = scene.material_at(hit->point);
      for (int c = 0; c < 3; ++c) {
        m.normal.at(x, y, c) = hit->normal[c];
        m.albedo.at(x, y, c) = mat.albedo[c];
      }
    }
  }
  return m;
}

GaussianCloud fitting_init(const SynthScene& scene, std::uint64_t seed, double jitter) {
  std::mt19937_64 rng(seed ^ 0x5eedf17ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  GaussianCloud cloud = scene.cloud;
  const double sigma = jitter * scene.params.radius;
  for (Gaussian& g : cloud.gaussians) {
    g.position += sigma * Vec3(gauss(rng), gauss(rng), gauss(rng));
    g.sh = Gaussian::zero_sh();
    const Vec3 tilt(gauss(rng), gauss(rng), gauss(rng));
    g.normal = (normal_of(g) + 0.6 * tilt.normalized()).normalized();
    g.albedo_logit = Vec3::Constant(logit(kDefaultAlbedo));
    g.roughness_logit = logit(kDefaultRoughness);
    g.metallic_logit = logit(kDefaultMetallic);
  }
  return cloud;
}

}  // namespace splatir
