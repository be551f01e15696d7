// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splatir/image.hpp"

#include <filesystem>

namespace splatir {

double srgb_to_linear(double c);
double linear_to_srgb(double c);

/// 8-bit PNG (gray, gray+alpha, RGB or RGBA), decoded from sRGB to linear. Alpha stays linear.
Image load_png(const std::filesystem::path& path);
/// Linear values are clamped to [0, 1], encoded to sRGB and quantized to 8 bits.
void save_png(const std::filesystem::path& path, const Image& img);

/// Width and height from the PNG header without decoding the pixels.
std::pair<int, int> png_size(const std::filesystem::path& path);

/// Portable float map ("PF" RGB or "Pf" gray), little-endian, rows stored bottom to top.
Image load_pfm(const std::filesystem::path& path);
void save_pfm(const std::filesystem::path& path, const Image& img);

}  // namespace splatir
