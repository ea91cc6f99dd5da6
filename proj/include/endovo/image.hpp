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

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "endovo/error.hpp"
#include "endovo/geom.hpp"

namespace endovo {

// Row-major single-channel raster.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {}
  Image(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(ErrorCode::kInvalidArgument, "image data size mismatch");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int u, int v) { return data_[index(u, v)]; }
  const T& operator()(int u, int v) const { return data_[index(u, v)]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool same_size(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const Image& other) const = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Intensities in [0, 1].
using GrayImage = Image<double>;

// Depth in meters (or any positive unit). Values <= 0 mark invalid pixels.
using DepthImage = Image<double>;

constexpr double kInvalidDepth = 0.0;

inline bool is_valid_depth(double d) { return d > 0.0; }

// Interleaved RGB, channels in [0, 1].
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // 3 * width * height

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(3 * std::size_t(w) * h) {}

  double* pixel(int u, int v) { return &data[3 * (std::size_t(v) * width + u)]; }
  const double* pixel(int u, int v) const {
    return &data[3 * (std::size_t(v) * width + u)];
  }
  bool operator==(const RgbImage&) const = default;
};

}  // namespace endovo
