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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "endovo/fusion.hpp"
#include "endovo/geom.hpp"
#include "endovo/image.hpp"

namespace endovo {

namespace fs = std::filesystem;

// All readers and writers throw Error(kIo) on filesystem or format problems.

// 8- or 16-bit PNG of any colour type, converted to RGB in [0, 1].
RgbImage read_png_rgb(const fs::path& path);
// 8-bit RGB, each channel rounded from [0, 1].
void write_png_rgb(const fs::path& path, const RgbImage& image);

// Single-channel 16-bit PNG, raw sample values.
Image<std::uint16_t> read_png_u16(const fs::path& path);
void write_png_u16(const fs::path& path, const Image<std::uint16_t>& image);

// Width and height from the PNG header.
std::pair<int, int> png_size(const fs::path& path);

// meters = raw * depth_scale; raw 0 is invalid.
DepthImage depth_from_raw(const Image<std::uint16_t>& raw, double depth_scale);
// Rounds to the nearest unit within [1, 65535]; invalid pixels become 0.
Image<std::uint16_t> depth_to_raw(const DepthImage& depth, double depth_scale);

RgbImage gray_to_rgb(const GrayImage& gray);

struct TumEntry {
  double timestamp = 0.0;
  Pose pose;  // world-from-camera
};

// `timestamp tx ty tz qx qy qz qw` per line.
std::string format_tum(std::span<const TumEntry> entries);
void write_tum(const fs::path& path, std::span<const TumEntry> entries);
// Skips blank lines and '#' comments.
std::vector<TumEntry> read_tum(const fs::path& path);

// ASCII PLY; vertex colors are written when present.
std::string format_ply(const TriangleMesh& mesh);
void write_ply(const fs::path& path, const TriangleMesh& mesh);
// Reads meshes written by write_ply.
TriangleMesh read_ply(const fs::path& path);

void write_text_file(const fs::path& path, const std::string& content);
std::string read_text_file(const fs::path& path);

}  // namespace endovo
