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

#include "endovo/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "endovo/error.hpp"
#include "endovo/imgproc.hpp"
#include "endovo/tracking.hpp"

namespace endovo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

TsdfVolume::TsdfVolume(const Vec3& origin, double voxel_size,
                       std::array<int, 3> dims, double trunc, bool with_color)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims), trunc_(trunc) {
  if (!(voxel_size > 0.0) || !(trunc > 0.0) || dims[0] < 1 || dims[1] < 1 ||
      dims[2] < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "tsdf volume: voxel size, truncation and dims must be positive");
  }
  const std::size_t n = std::size_t(dims[0]) * dims[1] * dims[2];
  tsdf_.assign(n, trunc_);
  weight_.assign(n, 0.0);
  if (with_color) color_.assign(3 * n, 0.0);
}

Vec3 TsdfVolume::color(int i, int j, int k) const {
  if (!has_color()) {
    throw Error(ErrorCode::kInvalidArgument, "tsdf volume has no color");
  }
  const double* c = &color_[3 * index(i, j, k)];
  return Vec3(c[0], c[1], c[2]);
}

void TsdfVolume::set(int i, int j, int k, double value, double weight) {
  const std::size_t idx = index(i, j, k);
  tsdf_[idx] = std::clamp(value, -trunc_, trunc_);
  weight_[idx] = std::max(weight, 0.0);
}

std::size_t TsdfVolume::bytes_required(std::array<int, 3> dims, bool with_color) {
  const std::size_t n = std::size_t(dims[0]) * dims[1] * dims[2];
  return n * sizeof(double) * (with_color ? 5 : 2);
}

void TsdfVolume::integrate(const DepthImage& depth, const RgbImage* color,
                           const PinholeCamera& cam, const Pose& pose_world) {
  if (depth.width() != cam.width || depth.height() != cam.height) {
    throw Error(ErrorCode::kInvalidArgument,
                "integrate: depth size does not match camera");
  }
  if (color && (color->width != cam.width || color->height != cam.height)) {
    throw Error(ErrorCode::kInvalidArgument,
                "integrate: color size does not match camera");
  }
  const bool blend_color = color && has_color();
  const Pose cam_from_world = pose_world.inverse();
  const Mat3& r = cam_from_world.rotation();
  const Vec3 step_x = r.col(0) * voxel_size_;
  const double max_u = cam.width - 1;
  const double max_v = cam.height - 1;

  for (int k = 0; k < dims_[2]; ++k) {
    for (int j = 0; j < dims_[1]; ++j) {
      Vec3 pc = cam_from_world * voxel_position(0, j, k);
      for (int i = 0; i < dims_[0]; ++i, pc += step_x) {
        const double z = pc.z();
        if (!(z > 0.0)) continue;
        const double u = cam.fx * pc.x() / z + cam.cx;
        const double v = cam.fy * pc.y() / z + cam.cy;
        if (!(u >= 0.0 && v >= 0.0 && u <= max_u && v <= max_v)) continue;
        const auto d = sample_bilinear_depth(depth, u, v);
        if (!d) continue;
        const double sdf = *d - z;
        if (sdf < -trunc_) continue;
        const double value = std::min(sdf, trunc_);
        const std::size_t idx = index(i, j, k);
        const double w = weight_[idx];
        tsdf_[idx] = (tsdf_[idx] * w + value) / (w + 1.0);
        if (blend_color) {
          const double* c = color->pixel(static_cast<int>(std::lround(u)),
                                         static_cast<int>(std::lround(v)));
          double* dst = &color_[3 * idx];
          for (int ch = 0; ch < 3; ++ch) dst[ch] = (dst[ch] * w + c[ch]) / (w + 1.0);
        }
        weight_[idx] = w + 1.0;
      }
    }
  }
}

void FusionConfig::validate() const {
  if (!(voxel_size > 0.0)) {
    throw Error(ErrorCode::kConfig, "fusion config: voxel_size must be > 0");
  }
  if (trunc && !(*trunc > 0.0)) {
    throw Error(ErrorCode::kConfig, "fusion config: trunc must be > 0");
  }
  if (bounds && !(bounds->max.array() > bounds->min.array()).all()) {
    throw Error(ErrorCode::kConfig, "fusion config: bounds max must exceed min");
  }
}

VolumeBounds compute_bounds(std::span<const FusionView> views, double margin) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const FusionView& view : views) {
    const DepthImage& depth = *view.depth;
    for (int v = 0; v < depth.height(); ++v) {
      for (int u = 0; u < depth.width(); ++u) {
        const double d = depth(u, v);
        if (!is_valid_depth(d)) continue;
        const Vec3 p = view.pose_world * backproject(view.camera, Vec2(u, v), d);
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
    }
  }
  if (!(hi.array() >= lo.array()).all()) {
    throw Error(ErrorCode::kInvalidArgument,
                "fusion: no valid depth to derive volume bounds from");
  }
  return {lo - Vec3::Constant(margin), hi + Vec3::Constant(margin)};
}

TsdfVolume integrate_views(std::span<const FusionView> views, const FusionConfig& cfg,
                           FusionStats* stats) {
  cfg.validate();
  if (views.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "fusion: no keyframes to fuse");
  }
  const double trunc = cfg.truncation();
  const VolumeBounds bounds = cfg.bounds ? *cfg.bounds : compute_bounds(views, trunc);
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    const double cells = std::ceil((bounds.max[a] - bounds.min[a]) / cfg.voxel_size);
    if (cells > 1e6) {
      throw Error(ErrorCode::kMemoryCap, "fusion: volume extent is unbounded");
    }
    dims[a] = static_cast<int>(cells) + 1;
  }
  bool with_color = cfg.use_color;
  for (const FusionView& view : views) with_color = with_color && view.color;
  const std::size_t bytes = TsdfVolume::bytes_required(dims, with_color);
  if (bytes > cfg.memory_cap_bytes) {
    std::ostringstream os;
    os << "fusion: a " << dims[0] << "x" << dims[1] << "x" << dims[2]
       << " voxel grid needs " << (bytes >> 20) << " MiB, above the cap of "
       << (cfg.memory_cap_bytes >> 20) << " MiB";
    throw Error(ErrorCode::kMemoryCap, os.str());
  }

  TsdfVolume vol(bounds.min, cfg.voxel_size, dims, trunc, with_color);
  const auto start = Clock::now();
  for (const FusionView& view : views) {
    vol.integrate(*view.depth, with_color ? view.color : nullptr, view.camera,
                  view.pose_world);
  }
  if (stats) {
    stats->dims = dims;
    stats->voxel_count = vol.voxel_count();
    stats->views_integrated = static_cast<int>(views.size());
    stats->integration_seconds = seconds_since(start);
  }
  return vol;
}

TriangleMesh fuse_views(std::span<const FusionView> views, const FusionConfig& cfg,
                        FusionStats* stats) {
  const TsdfVolume vol = integrate_views(views, cfg, stats);
  const auto start = Clock::now();
  TriangleMesh mesh = extract_mesh(vol);
  if (stats) stats->extraction_seconds = seconds_since(start);
  return mesh;
}

TriangleMesh fuse_keyframes(std::span<const Keyframe> keyframes,
                            const FusionConfig& cfg, FusionStats* stats) {
  std::vector<FusionView> views;
  views.reserve(keyframes.size());
  for (const Keyframe& kf : keyframes) {
    views.push_back({&kf.depth(), kf.color() ? &*kf.color() : nullptr, kf.camera(0),
                     kf.pose_world()});
  }
  return fuse_views(views, cfg, stats);
}

}  // namespace endovo
