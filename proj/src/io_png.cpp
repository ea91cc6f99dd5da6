// Copyright 2026 The Endovo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include "endovo/error.hpp"
#include "endovo/io.hpp"

namespace endovo {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return f;
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;  // row-major, interleaved
};

// Expands palettes and low bit depths, drops alpha, keeps 8/16-bit samples.
DecodedPng decode_png(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8)) {
    throw Error(ErrorCode::kIo, path.string() + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::kIo, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  DecodedPng out;
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIo, "failed to decode " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * out.height);
  rows.resize(out.height);
  for (int v = 0; v < out.height; ++v) rows[v] = buffer.data() + row_bytes * v;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n = std::size_t(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = buffer[i];
  }
  return out;
}

void encode_png(const fs::path& path, int width, int height, int channels,
                int bit_depth, const std::vector<png_byte>& buffer) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::kIo, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(height);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "failed to encode " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t row_bytes = std::size_t(width) * channels * (bit_depth / 8);
  for (int v = 0; v < height; ++v) {
    rows[v] = const_cast<png_bytep>(buffer.data()) + row_bytes * v;
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

RgbImage read_png_rgb(const fs::path& path) {
  const DecodedPng png = decode_png(path);
  const double max_value = png.bit_depth == 16 ? 65535.0 : 255.0;
  RgbImage out(png.width, png.height);
  const std::size_t n = std::size_t(png.width) * png.height;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const int src = png.channels >= 3 ? c : 0;
      out.data[3 * i + c] = png.samples[i * png.channels + src] / max_value;
    }
  }
  return out;
}

void write_png_rgb(const fs::path& path, const RgbImage& image) {
  std::vector<png_byte> buffer(image.data.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const double v = std::clamp(image.data[i], 0.0, 1.0);
    buffer[i] = static_cast<png_byte>(std::lround(v * 255.0));
  }
  encode_png(path, image.width, image.height, 3, 8, buffer);
}

Image<std::uint16_t> read_png_u16(const fs::path& path) {
  const DecodedPng png = decode_png(path);
  if (png.channels != 1 || png.bit_depth != 16) {
    throw Error(ErrorCode::kIo, path.string() + " is not a 16-bit single-channel PNG");
  }
  return Image<std::uint16_t>(png.width, png.height, png.samples);
}

void write_png_u16(const fs::path& path, const Image<std::uint16_t>& image) {
  const auto data = image.data();
  std::vector<png_byte> buffer(2 * data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    buffer[2 * i] = static_cast<png_byte>(data[i] >> 8);
    buffer[2 * i + 1] = static_cast<png_byte>(data[i] & 0xff);
  }
  encode_png(path, image.width(), image.height(), 1, 16, buffer);
}

std::pair<int, int> png_size(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte header[24];
  if (std::fread(header, 1, 24, file.get()) != 24 || png_sig_cmp(header, 0, 8)) {
    throw Error(ErrorCode::kIo, path.string() + " is not a PNG file");
  }
  auto be32 = [&](int offset) {
    return int((header[offset] << 24) | (header[offset + 1] << 16) |
               (header[offset + 2] << 8) | header[offset + 3]);
  };
  return {be32(16), be32(20)};
}

DepthImage depth_from_raw(const Image<std::uint16_t>& raw, double depth_scale) {
  if (!(depth_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "depth_scale must be positive");
  }
  DepthImage out(raw.width(), raw.height(), kInvalidDepth);
  const auto src = raw.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] != 0) dst[i] = src[i] * depth_scale;
  }
  return out;
}

Image<std::uint16_t> depth_to_raw(const DepthImage& depth, double depth_scale) {
  if (!(depth_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "depth_scale must be positive");
  }
  Image<std::uint16_t> out(depth.width(), depth.height(), 0);
  const auto src = depth.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!is_valid_depth(src[i])) continue;
    const double units = std::round(src[i] / depth_scale);
    dst[i] = static_cast<std::uint16_t>(std::clamp(units, 1.0, 65535.0));
  }
  return out;
}

RgbImage gray_to_rgb(const GrayImage& gray) {
  RgbImage out(gray.width(), gray.height());
  for (int v = 0; v < gray.height(); ++v) {
    for (int u = 0; u < gray.width(); ++u) {
      double* p = out.pixel(u, v);
      p[0] = p[1] = p[2] = gray(u, v);
    }
  }
  return out;
}

}  // namespace endovo
