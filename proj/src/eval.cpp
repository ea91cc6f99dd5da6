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

#include "endovo/eval.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "endovo/error.hpp"
#include "endovo/tracking.hpp"

namespace endovo {

namespace {

bool jointly_valid(double p, double g) {
  return std::isfinite(p) && std::isfinite(g) && p > 0.0 && g > 0.0;
}

void require_same_size(const DepthImage& pred, const DepthImage& gt) {
  if (!pred.same_size(gt)) {
    throw Error(ErrorCode::kInvalidArgument,
                "depth evaluation: prediction and ground truth differ in size");
  }
}

}  // namespace

const char* to_string(ScaleMode mode) {
  switch (mode) {
    case ScaleMode::kNone: return "none";
    case ScaleMode::kMedianRatio: return "median_ratio";
    case ScaleMode::kRatioMedian: return "ratio_median";
  }
  return "none";
}

std::optional<ScaleMode> parse_scale_mode(std::string_view text) {
  if (text == "none") return ScaleMode::kNone;
  if (text == "median_ratio") return ScaleMode::kMedianRatio;
  if (text == "ratio_median") return ScaleMode::kRatioMedian;
  return std::nullopt;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "median of an empty set");
  }
  const auto mid = values.begin() + (values.size() - 1) / 2;
  std::nth_element(values.begin(), mid, values.end());
  const double lower = *mid;
  if (values.size() % 2 == 1) return lower;
  const double upper = *std::min_element(mid + 1, values.end());
  return 0.5 * (lower + upper);
}

ScaledDepth align_scale(const DepthImage& pred, const DepthImage& gt, ScaleMode mode) {
  require_same_size(pred, gt);
  std::vector<double> p;
  std::vector<double> g;
  const auto pd = pred.data();
  const auto gd = gt.data();
  for (std::size_t i = 0; i < pd.size(); ++i) {
    if (!jointly_valid(pd[i], gd[i])) continue;
    p.push_back(pd[i]);
    g.push_back(gd[i]);
  }
  if (p.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "depth evaluation: no pixel is valid in both prediction and ground truth");
  }

  double s = 1.0;
  if (mode == ScaleMode::kMedianRatio) {
    const double mp = median(p);
    if (!(mp != 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "depth evaluation: median prediction is 0");
    }
    s = median(g) / mp;
  } else if (mode == ScaleMode::kRatioMedian) {
    std::vector<double> ratios(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) ratios[i] = g[i] / p[i];
    s = median(std::move(ratios));
  }

  ScaledDepth out{pred, s};
  if (mode != ScaleMode::kNone) {
    for (double& d : out.depth.data()) {
      if (is_valid_depth(d)) d *= s;
    }
  }
  return out;
}

DepthMetrics depth_metrics(const DepthImage& pred, const DepthImage& gt, ScaleMode mode) {
  const ScaledDepth scaled = align_scale(pred, gt, mode);
  const auto pd = scaled.depth.data();
  const auto gd = gt.data();
  const auto raw = pred.data();

  DepthMetrics m;
  double abs_rel = 0.0, sq_rel = 0.0, sq = 0.0, sq_log = 0.0;
  long long d1 = 0, d2 = 0, d3 = 0, n = 0, n_log = 0;
  for (std::size_t i = 0; i < pd.size(); ++i) {
    if (!jointly_valid(raw[i], gd[i])) continue;
    const double g = gd[i];
    const double p = pd[i];
    const double diff = g - p;
    ++n;
    abs_rel += std::abs(diff) / g;
    sq_rel += diff * diff / g;
    sq += diff * diff;
    if (p > 0.0) {
      const double l = std::log(g) - std::log(p);
      sq_log += l * l;
      ++n_log;
      const double ratio = std::max(p / g, g / p);
      d1 += ratio < 1.25;
      d2 += ratio < 1.25 * 1.25;
      d3 += ratio < 1.25 * 1.25 * 1.25;
    } else {
      ++m.n_log_excluded;
    }
  }
  if (n_log == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "depth evaluation: every scaled prediction is non-positive");
  }
  const double inv = 1.0 / double(n);
  m.abs_rel = abs_rel * inv;
  m.sq_rel = sq_rel * inv;
  m.rmse = std::sqrt(sq * inv);
  m.rmse_log = std::sqrt(sq_log / double(n_log));
  m.delta1 = double(d1) * inv;
  m.delta2 = double(d2) * inv;
  m.delta3 = double(d3) * inv;
  m.n_pixels = n;
  return m;
}

DepthMetrics aggregate_metrics(std::span<const DepthMetrics> per_image) {
  if (per_image.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "aggregate_metrics: no images");
  }
  DepthMetrics out;
  for (const DepthMetrics& m : per_image) {
    out.abs_rel += m.abs_rel;
    out.sq_rel += m.sq_rel;
    out.rmse += m.rmse;
    out.rmse_log += m.rmse_log;
    out.delta1 += m.delta1;
    out.delta2 += m.delta2;
    out.delta3 += m.delta3;
    out.n_pixels += m.n_pixels;
    out.n_log_excluded += m.n_log_excluded;
  }
  const double inv = 1.0 / double(per_image.size());
  out.abs_rel *= inv;
  out.sq_rel *= inv;
  out.rmse *= inv;
  out.rmse_log *= inv;
  out.delta1 *= inv;
  out.delta2 *= inv;
  out.delta3 *= inv;
  return out;
}

int frames_until_failure(std::optional<int> failure_frame, int frame_count) {
  return failure_frame ? *failure_frame : frame_count;
}

int frames_until_failure(const OdometryResult& result) {
  return frames_until_failure(result.failure_frame,
                              static_cast<int>(result.trajectory.size()));
}

double absolute_trajectory_error(std::span<const Vec3> estimate,
                                 std::span<const Vec3> reference) {
  if (estimate.size() != reference.size() || estimate.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "ATE needs two trajectories of equal length >= 3");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(estimate.size());
  Eigen::Matrix3Xd src(3, n);
  Eigen::Matrix3Xd dst(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    src.col(i) = estimate[i];
    dst.col(i) = reference[i];
  }
  const Eigen::Matrix4d t = Eigen::umeyama(src, dst, false);
  const Eigen::Matrix3Xd aligned =
      (t.topLeftCorner<3, 3>() * src).colwise() + t.topRightCorner<3, 1>();
  return std::sqrt((aligned - dst).colwise().squaredNorm().mean());
}

double path_length(std::span<const Vec3> positions) {
  double len = 0.0;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    len += (positions[i] - positions[i - 1]).norm();
  }
  return len;
}

}  // namespace endovo
