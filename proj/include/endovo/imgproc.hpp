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

#include <optional>
#include <vector>

#include "endovo/geom.hpp"
#include "endovo/image.hpp"

namespace endovo {

// Luma with weights (0.299, 0.587, 0.114).
GrayImage to_grayscale(const RgbImage& rgb);

// 2x2 box filter to half size (floor). Requires width, height >= 2.
GrayImage downsample(const GrayImage& img);
// Valid-only mean of each 2x2 block; blocks with no valid pixel become
// kInvalidDepth.
DepthImage downsample_depth(const DepthImage& depth);

// Bilinear interpolation at (u, v). Empty when the 2x2 support leaves the
// image. Throws Error(kInvalidArgument) on NaN coordinates.
std::optional<double> sample_bilinear(const GrayImage& img, double u, double v);

// As sample_bilinear, but also empty when a neighbour carrying non-zero weight
// holds an invalid depth.
std::optional<double> sample_bilinear_depth(const DepthImage& depth, double u,
                                            double v);

// Value of the bilinear interpolant and its exact partial derivatives.
struct BilinearSample {
  double value = 0.0;
  double du = 0.0;
  double dv = 0.0;
};
std::optional<BilinearSample> sample_bilinear_with_gradient(const GrayImage& img,
                                                            double u, double v);

struct ImageGradient {
  GrayImage gx;
  GrayImage gy;
};

// Central differences inside, one-sided differences on the border.
// Requires width, height >= 3.
ImageGradient gradient(const GrayImage& img);

struct SsimResult {
  GrayImage map;
  double mean = 0.0;
};

inline constexpr int kDefaultSsimWindow = 7;

// SSIM over a uniform window with reflection padding at the borders, so every
// pixel owns a full window. C1 = 0.01^2, C2 = 0.03^2.
SsimResult ssim(const GrayImage& a, const GrayImage& b,
                int window = kDefaultSsimWindow);

struct AppearanceOptions {
  int ssim_window = kDefaultSsimWindow;
  bool use_ssim = true;
};

// Per-pixel alpha * |target - warped| + (1 - SSIM(target, warped)).
GrayImage appearance_residual(const GrayImage& target, const GrayImage& warped,
                              double alpha, const AppearanceOptions& options = {});

struct PyramidLevel {
  GrayImage intensity;
  std::optional<DepthImage> depth;
  PinholeCamera camera;
};

// Level 0 is full resolution; each further level halves the previous one.
class ImagePyramid {
 public:
  ImagePyramid() = default;
  ImagePyramid(const GrayImage& intensity, std::optional<DepthImage> depth,
               const PinholeCamera& camera, int levels);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const PyramidLevel& level(int l) const { return levels_.at(l); }
  bool has_depth() const { return !levels_.empty() && levels_[0].depth.has_value(); }

 private:
  std::vector<PyramidLevel> levels_;
};

}  // namespace endovo
