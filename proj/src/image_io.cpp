// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/image_io.hpp"

#include "splatir/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace splatir {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

Image load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw ParseError(path.string() + ": " + image.message);
  }
  int channels = 3;
  if (image.format & PNG_FORMAT_FLAG_COLOR) {
    image.format = (image.format & PNG_FORMAT_FLAG_ALPHA) ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
    channels = (image.format & PNG_FORMAT_FLAG_ALPHA) ? 4 : 3;
  } else {
    image.format = (image.format & PNG_FORMAT_FLAG_ALPHA) ? PNG_FORMAT_GA : PNG_FORMAT_GRAY;
    channels = (image.format & PNG_FORMAT_FLAG_ALPHA) ? 2 : 1;
  }
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    throw ParseError(path.string() + ": " + image.message);
  }
  Image out(static_cast<int>(image.width), static_cast<int>(image.height), channels);
  const bool has_alpha = channels == 2 || channels == 4;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const double v = buffer[i] / 255.0;
    const bool alpha = has_alpha && (i % channels == static_cast<std::size_t>(channels - 1));
    out.data[i] = alpha ? v : srgb_to_linear(v);
  }
  return out;
}

void save_png(const std::filesystem::path& path, const Image& img) {
  if (img.channels < 1 || img.channels > 4) throw InvalidParameter("PNG needs 1 to 4 channels");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  static const png_uint_32 kFormats[] = {PNG_FORMAT_GRAY, PNG_FORMAT_GA, PNG_FORMAT_RGB,
                                         PNG_FORMAT_RGBA};
  image.format = kFormats[img.channels - 1];
  const bool has_alpha = img.channels == 2 || img.channels == 4;
  std::vector<png_byte> buffer(img.data.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    double v = std::clamp(img.data[i], 0.0, 1.0);
    if (!std::isfinite(img.data[i])) v = 0.0;
    const bool alpha = has_alpha && (i % img.channels == static_cast<std::size_t>(img.channels - 1));
    if (!alpha) v = linear_to_srgb(v);
    buffer[i] = static_cast<png_byte>(std::lround(v * 255.0));
  }
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw PreconditionError(path.string() + ": " + image.message);
  }
}

std::pair<int, int> png_size(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw ParseError(path.string() + ": " + image.message);
  }
  const std::pair<int, int> size{static_cast<int>(image.width), static_cast<int>(image.height)};
  png_image_free(&image);
  return size;
}

Image load_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  in.get();  // single whitespace before the raster
  if (!in || (magic != "PF" && magic != "Pf") || w <= 0 || h <= 0 || scale == 0.0) {
    throw ParseError(path.string() + ": malformed PFM header");
  }
  if (scale > 0.0) throw ParseError(path.string() + ": big-endian PFM is not supported");
  const int channels = magic == "PF" ? 3 : 1;
  std::vector<float> raw(static_cast<std::size_t>(w) * h * channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (static_cast<std::size_t>(in.gcount()) != raw.size() * 4) {
    throw ParseError(path.string() + ": truncated PFM raster");
  }
  Image img(w, h, channels);
  for (int y = 0; y < h; ++y) {
    const int src_row = h - 1 - y;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        const float v = raw[(static_cast<std::size_t>(src_row) * w + x) * channels + c];
        if (!std::isfinite(v)) {
          throw ParseError(path.string() + ": non-finite value at pixel (" + std::to_string(x) +
                           ", " + std::to_string(y) + ") channel " + std::to_string(c));
        }
        img.at(x, y, c) = v;
      }
    }
  }
  return img;
}

void save_pfm(const std::filesystem::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw InvalidParameter("PFM needs 1 or 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << (img.channels == 3 ? "PF" : "Pf") << "\n" << img.width << " " << img.height << "\n-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(img.width) * img.channels);
  for (int y = img.height - 1; y >= 0; --y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        row[static_cast<std::size_t>(x) * img.channels + c] = static_cast<float>(img.at(x, y, c));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
  }
  if (!out) throw PreconditionError("failed writing " + path.string());
}

}  // namespace splatir
