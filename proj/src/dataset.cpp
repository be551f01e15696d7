// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/dataset.hpp"

#include "splatir/cameras_json.hpp"
#include "splatir/errors.hpp"
#include "splatir/image_io.hpp"

namespace splatir {

Dataset load_dataset(const std::filesystem::path& transforms_json) {
  Dataset ds;
  for (const CameraFrame& frame : load_cameras(transforms_json)) {
    const auto path = frame_image_path(transforms_json, frame.file_path);
    Image img = load_png(path);
    if (img.width != frame.camera.width || img.height != frame.camera.height) {
      throw PreconditionError(path.string() + ": image size does not match its camera");
    }
    Image rgb(img.width, img.height, 3);
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
      const double* src = img.data.data() + p * img.channels;
      const double alpha = (img.channels == 2 || img.channels == 4) ? src[img.channels - 1] : 1.0;
      for (int c = 0; c < 3; ++c) {
        const double v = img.channels >= 3 ? src[c] : src[0];
        rgb.data[p * 3 + c] = v * alpha;
      }
    }
    ds.views.push_back({path.stem().string(), frame.camera, std::move(rgb)});
  }
  return ds;
}

}  // namespace splatir
