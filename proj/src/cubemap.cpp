// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/cubemap.hpp"

#include "splatir/errors.hpp"
#include "splatir/sh.hpp"

#include <cmath>

namespace splatir {

const FaceBasis& face_basis(int face) {
  static const std::array<FaceBasis, kCubeFaces> kBases = {{
      {Vec3(0, 0, 1), Vec3(0, -1, 0), Vec3(1, 0, 0)},
      {Vec3(0, 0, -1), Vec3(0, -1, 0), Vec3(-1, 0, 0)},
      {Vec3(-1, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0)},
      {Vec3(-1, 0, 0), Vec3(0, 0, -1), Vec3(0, -1, 0)},
      {Vec3(-1, 0, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)},
      {Vec3(1, 0, 0), Vec3(0, -1, 0), Vec3(0, 0, -1)},
  }};
  if (face < 0 || face >= kCubeFaces) throw InvalidParameter("cube face index out of range");
  return kBases[face];
}

Cubemap::Cubemap(int res, int channels, double fill) : resolution(res) {
  for (Image& f : faces) f = Image(res, res, channels, fill);
}

Camera face_camera(int face, const Vec3& center, int resolution, double near, double far) {
  const FaceBasis& b = face_basis(face);
  Camera cam;
  cam.width = cam.height = resolution;
  cam.fx = cam.fy = 0.5 * resolution;
  cam.cx = cam.cy = 0.5 * resolution;
  cam.near = near;
  cam.far = far;
  Mat3 r;
  r.row(0) = b.right.transpose();
  r.row(1) = b.down.transpose();
  r.row(2) = b.forward.transpose();
  cam.world_to_camera.setIdentity();
  cam.world_to_camera.topLeftCorner<3, 3>() = r;
  cam.world_to_camera.topRightCorner<3, 1>() = -r * center;
  return cam;
}

Vec3 texel_direction(int face, int x, int y, int resolution) {
  const FaceBasis& b = face_basis(face);
  const double u = 2.0 * (x + 0.5) / resolution - 1.0;
  const double v = 2.0 * (y + 0.5) / resolution - 1.0;
  return (b.forward + u * b.right + v * b.down).normalized();
}

FaceCoord direction_to_face(const Vec3& dir, int resolution) {
  int axis = 0;
  dir.cwiseAbs().maxCoeff(&axis);
  const int face = 2 * axis + (dir[axis] < 0.0 ? 1 : 0);
  const FaceBasis& b = face_basis(face);
  const double f = dir.dot(b.forward);
  const double half = 0.5 * resolution;
  return {face, half * dir.dot(b.right) / f + half, half * dir.dot(b.down) / f + half};
}

namespace {

double corner_area(double x, double y) { return std::atan2(x * y, std::sqrt(x * x + y * y + 1.0)); }

}  // namespace

double texel_solid_angle(int x, int y, int resolution) {
  const double x0 = 2.0 * x / resolution - 1.0, x1 = 2.0 * (x + 1) / resolution - 1.0;
  const double y0 = 2.0 * y / resolution - 1.0, y1 = 2.0 * (y + 1) / resolution - 1.0;
  return corner_area(x1, y1) - corner_area(x0, y1) - corner_area(x1, y0) + corner_area(x0, y0);
}

CellCubemaps render_cell_cubemaps(const GaussianCloud& cloud, const Vec3& center, int resolution,
                                  const RasterSettings& settings, double near, double far) {
  if (resolution < 1) throw InvalidParameter("cubemap resolution must be positive");
  CellCubemaps out{Cubemap(resolution, 1, far), Cubemap(resolution, 3)};
  out.depth.sentinel = far;
  for (int face = 0; face < kCubeFaces; ++face) {
    const Camera cam = face_camera(face, center, resolution, near, far);
    if (cloud.empty()) {
      Image& rad = out.radiance.faces[face];
      for (std::size_t p = 0; p < rad.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) rad.data[p * 3 + c] = settings.background[c];
      }
      continue;
    }
    FrameBuffers fb = rasterize_forward(cloud, cam, {}, settings);
    out.depth.faces[face] = std::move(fb.depth_linear);
    out.radiance.faces[face] = std::move(fb.color);
  }
  return out;
}

Cubemap occlusion_from_depth(const Cubemap& depth, double tau) {
  if (!(tau > 0.0)) throw InvalidParameter("occlusion threshold must be positive");
  const int F = depth.resolution;
  Cubemap out(F, 1);
  for (int face = 0; face < kCubeFaces; ++face) {
    for (int y = 0; y < F; ++y) {
      for (int x = 0; x < F; ++x) {
        const double d = depth.faces[face].at(x, y);
        if (!(d < depth.sentinel)) continue;
        const double u = 2.0 * (x + 0.5) / F - 1.0;
        const double v = 2.0 * (y + 0.5) / F - 1.0;
        const double radial = d * std::sqrt(1.0 + u * u + v * v);
        out.faces[face].at(x, y) = radial < tau ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

std::vector<double> sh_project_cubemap(const Cubemap& cm, int degree) {
  const int n = sh_coeff_count(degree);
  const int C = cm.channels();
  const int F = cm.resolution;
  std::vector<double> coeffs(static_cast<std::size_t>(C) * n, 0.0);
  std::array<double, kMaxShCoeffs> basis{};
  for (int face = 0; face < kCubeFaces; ++face) {
    const Image& img = cm.faces[face];
    if (img.width != F || img.height != F) {
      throw InvalidParameter("cubemap faces have inconsistent resolution");
    }
    for (int y = 0; y < F; ++y) {
      for (int x = 0; x < F; ++x) {
        sh_eval(degree, texel_direction(face, x, y, F), basis);
        const double omega = texel_solid_angle(x, y, F);
        for (int c = 0; c < C; ++c) {
          const double v = img.at(x, y, c) * omega;
          if (v == 0.0) continue;
          for (int k = 0; k < n; ++k) coeffs[static_cast<std::size_t>(c) * n + k] += v * basis[k];
        }
      }
    }
  }
  return coeffs;
}

}  // namespace splatir
