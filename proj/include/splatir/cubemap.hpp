// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/camera.hpp"
#include "splatir/gaussian.hpp"
#include "splatir/image.hpp"
#include "splatir/rasterizer.hpp"

#include <array>
#include <vector>

namespace splatir {

/// Face order +X, -X, +Y, -Y, +Z, -Z.
inline constexpr int kCubeFaces = 6;

struct FaceBasis {
  Vec3 right;
  Vec3 down;
  Vec3 forward;
};

const FaceBasis& face_basis(int face);

struct Cubemap {
  int resolution = 0;
  std::array<Image, kCubeFaces> faces;
  /// Depth value of texels that saw nothing (depth cubemaps only).
  double sentinel = 0.0;

  Cubemap() = default;
  Cubemap(int res, int channels, double fill = 0.0);
  int channels() const { return faces[0].channels; }
};

/// 90 degree camera at `center` looking through `face`.
Camera face_camera(int face, const Vec3& center, int resolution, double near, double far);

/// Unit direction through the center of texel (x, y) of a face.
Vec3 texel_direction(int face, int x, int y, int resolution);

struct FaceCoord {
  int face;
  double u;  // pixel coordinates, texel centers at half-integers
  double v;
};

FaceCoord direction_to_face(const Vec3& dir, int resolution);

/// Exact solid angle subtended by texel (x, y) of any face.
double texel_solid_angle(int x, int y, int resolution);

struct CellCubemaps {
  Cubemap depth;     // camera-z depth per face, `sentinel` where uncovered
  Cubemap radiance;  // RGB, background where uncovered
};

/// Six linear-depth and color renders from one point.
CellCubemaps render_cell_cubemaps(const GaussianCloud& cloud, const Vec3& center, int resolution,
                                  const RasterSettings& settings, double near = 0.01,
                                  double far = 100.0);

/// 1 where the texel's distance from the center is below tau, else 0. Distances are
/// measured along the texel ray, not along the face axis; sentinel texels are 0.
Cubemap occlusion_from_depth(const Cubemap& depth, double tau);

/// Solid-angle weighted projection onto real SH. Output is channel-major:
/// coeffs[c * (deg+1)^2 + k].
std::vector<double> sh_project_cubemap(const Cubemap& cm, int degree);

}  // namespace splatir
