// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatir/containers.hpp"

#include "splatir/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace splatir {
namespace {

static_assert(std::endian::native == std::endian::little,
              "containers are written in host byte order, which must be little-endian");

constexpr char kVolumeMagic[8] = {'G', 'S', 'I', 'R', 'V', 'O', 'L', '1'};
constexpr char kLutMagic[8] = {'G', 'S', 'I', 'R', 'L', 'U', 'T', '1'};
constexpr std::uint32_t kKindBrdf = 1;
constexpr std::uint32_t kKindPrefiltered = 2;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw PreconditionError("cannot write " + path.string());
  }
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void floats(const std::vector<double>& v) {
    for (double d : v) put(static_cast<float>(d));
  }
  void finish() {
    out_.flush();
    if (!out_) throw PreconditionError("failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw PreconditionError("cannot open " + path.string());
  }
  template <typename T>
  T get() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in_.gcount() != sizeof(T)) throw ParseError(path_.string() + ": truncated file");
    return v;
  }
  void magic(const char (&expected)[8]) {
    char m[8];
    in_.read(m, 8);
    if (in_.gcount() != 8 || std::memcmp(m, expected, 8) != 0) {
      throw ParseError(path_.string() + ": bad magic (expected " + std::string(expected, 8) + ")");
    }
  }
  std::vector<double> floats(std::size_t n, const char* what) {
    std::vector<float> raw(n);
    in_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 4));
    if (static_cast<std::size_t>(in_.gcount()) != n * 4) {
      throw ParseError(path_.string() + ": truncated " + what);
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(raw[i])) {
        throw ParseError(path_.string() + ": non-finite " + what + " value at index " +
                         std::to_string(i));
      }
      out[i] = raw[i];
    }
    return out;
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw ParseError(path_.string() + ": trailing bytes after payload");
    }
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

std::uint32_t checked_dim(std::uint32_t v, std::uint32_t lo, std::uint32_t hi,
                          const std::filesystem::path& path, const char* what) {
  if (v < lo || v > hi) {
    throw ParseError(path.string() + ": " + what + " out of range (" + std::to_string(v) + ")");
  }
  return v;
}

}  // namespace

void save_volume(const std::filesystem::path& path, const VolumeGrid& grid) {
  grid.validate();
  Writer w(path);
  w.bytes(kVolumeMagic, 8);
  for (int d : grid.dims) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  for (int i = 0; i < 3; ++i) w.put<double>(grid.min[i]);
  for (int i = 0; i < 3; ++i) w.put<double>(grid.max[i]);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(grid.degree));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(grid.channels));
  w.floats(grid.coeffs);
  w.finish();
}

VolumeGrid load_volume(const std::filesystem::path& path) {
  Reader r(path);
  r.magic(kVolumeMagic);
  std::array<int, 3> dims{};
  for (int& d : dims) d = static_cast<int>(checked_dim(r.get<std::uint32_t>(), 2, 4096, path, "grid dimension"));
  Vec3 lo, hi;
  for (int i = 0; i < 3; ++i) lo[i] = r.get<double>();
  for (int i = 0; i < 3; ++i) hi[i] = r.get<double>();
  const int degree = static_cast<int>(checked_dim(r.get<std::uint32_t>(), 0, kMaxShDegree, path, "SH degree"));
  const int channels = static_cast<int>(checked_dim(r.get<std::uint32_t>(), 1, 64, path, "channel count"));
  if (!lo.allFinite() || !hi.allFinite() || !((hi - lo).minCoeff() > 0.0)) {
    throw ParseError(path.string() + ": invalid grid bounds");
  }
  VolumeGrid grid(dims, lo, hi, degree, channels);
  grid.coeffs = r.floats(grid.coeffs.size(), "coefficient");
  r.expect_end();
  return grid;
}

void save_brdf_lut(const std::filesystem::path& path, const BrdfLut& lut) {
  const std::size_t n = static_cast<std::size_t>(lut.resolution) * lut.resolution;
  if (lut.resolution < 2 || lut.scale.size() != n || lut.bias.size() != n) {
    throw InvalidParameter("BRDF table has inconsistent size");
  }
  Writer w(path);
  w.bytes(kLutMagic, 8);
  w.put<std::uint32_t>(kKindBrdf);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(lut.resolution));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(lut.resolution));
  w.put<std::uint32_t>(1);
  w.put<std::uint32_t>(2);
  for (std::size_t i = 0; i < n; ++i) {
    w.put(static_cast<float>(lut.scale[i]));
    w.put(static_cast<float>(lut.bias[i]));
  }
  w.finish();
}

BrdfLut load_brdf_lut(const std::filesystem::path& path) {
  Reader r(path);
  r.magic(kLutMagic);
  if (r.get<std::uint32_t>() != kKindBrdf) throw ParseError(path.string() + ": not a BRDF table");
  const auto width = checked_dim(r.get<std::uint32_t>(), 2, 4096, path, "width");
  const auto height = r.get<std::uint32_t>();
  if (height != width) throw ParseError(path.string() + ": BRDF table must be square");
  if (r.get<std::uint32_t>() != 1 || r.get<std::uint32_t>() != 2) {
    throw ParseError(path.string() + ": BRDF table must have 1 layer and 2 channels");
  }
  BrdfLut lut;
  lut.resolution = static_cast<int>(width);
  const std::size_t n = static_cast<std::size_t>(width) * width;
  const auto data = r.floats(2 * n, "table");
  lut.scale.resize(n);
  lut.bias.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    lut.scale[i] = data[2 * i];
    lut.bias[i] = data[2 * i + 1];
  }
  r.expect_end();
  return lut;
}

void save_prefiltered(const std::filesystem::path& path, const PrefilteredEnv& pre) {
  Writer w(path);
  w.bytes(kLutMagic, 8);
  w.put<std::uint32_t>(kKindPrefiltered);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(pre.width));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(pre.height));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(pre.levels));
  w.put<std::uint32_t>(3);
  for (const auto& level : pre.images) w.floats(level);
  w.finish();
}

PrefilteredEnv load_prefiltered(const std::filesystem::path& path) {
  Reader r(path);
  r.magic(kLutMagic);
  if (r.get<std::uint32_t>() != kKindPrefiltered) {
    throw ParseError(path.string() + ": not a prefiltered environment");
  }
  PrefilteredEnv pre;
  pre.width = static_cast<int>(checked_dim(r.get<std::uint32_t>(), 2, 1 << 16, path, "width"));
  pre.height = static_cast<int>(checked_dim(r.get<std::uint32_t>(), 2, 1 << 16, path, "height"));
  pre.levels = static_cast<int>(checked_dim(r.get<std::uint32_t>(), 2, 64, path, "level count"));
  if (r.get<std::uint32_t>() != 3) throw ParseError(path.string() + ": expected 3 channels");
  const std::size_t n = static_cast<std::size_t>(pre.width) * pre.height * 3;
  for (int l = 0; l < pre.levels; ++l) pre.images.push_back(r.floats(n, "level"));
  pre.operators.assign(pre.levels, {});
  r.expect_end();
  return pre;
}

}  // namespace splatir
