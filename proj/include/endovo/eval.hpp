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
#include <span>
#include <string_view>
#include <vector>

#include "endovo/geom.hpp"
#include "endovo/image.hpp"

namespace endovo {

struct OdometryResult;

enum class ScaleMode {
  kNone,
  // s = median(gt) / median(pred)
  kMedianRatio,
  // s = median(gt / pred), elementwise over jointly valid pixels
  kRatioMedian,
};

const char* to_string(ScaleMode mode);
std::optional<ScaleMode> parse_scale_mode(std::string_view text);

// Median; even counts average the two middle values. Throws on empty input.
double median(std::vector<double> values);

struct ScaledDepth {
  DepthImage depth;  // pred * scale; invalid pixels stay invalid
  double scale = 1.0;
};

// Statistics use only pixels valid in both maps. Throws
// Error(kInvalidArgument) on size mismatch or when no pixel is jointly valid.
ScaledDepth align_scale(const DepthImage& pred, const DepthImage& gt, ScaleMode mode);

struct DepthMetrics {
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double rmse = 0.0;
  double rmse_log = 0.0;  // natural log
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  long long n_pixels = 0;
  // Jointly valid pixels whose scaled prediction was not positive; they are
  // left out of rmse_log.
  long long n_log_excluded = 0;
};

DepthMetrics depth_metrics(const DepthImage& pred, const DepthImage& gt, ScaleMode mode);

// Unweighted mean over images; pixel counts are summed.
DepthMetrics aggregate_metrics(std::span<const DepthMetrics> per_image);

// Index of the failure frame, or the number of processed frames when tracking
// never failed.
int frames_until_failure(const OdometryResult& result);
int frames_until_failure(std::optional<int> failure_frame, int frame_count);

// RMS position error after a least-squares rigid alignment of `estimate` onto
// `reference` (equal lengths, at least three positions).
double absolute_trajectory_error(std::span<const Vec3> estimate,
                                 std::span<const Vec3> reference);

double path_length(std::span<const Vec3> positions);

}  // namespace endovo
