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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "endovo/geom.hpp"
#include "endovo/image.hpp"

namespace endovo {

class Keyframe;

// Dense voxel grid of truncated signed distances. Voxel (i, j, k) samples the
// point origin + voxel_size * (i, j, k). Positive values lie in front of the
// observed surface, negative behind it.
class TsdfVolume {
 public:
  TsdfVolume(const Vec3& origin, double voxel_size, std::array<int, 3> dims,
             double trunc, bool with_color = false);

  const Vec3& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }
  const std::array<int, 3>& dims() const { return dims_; }
  double trunc() const { return trunc_; }
  bool has_color() const { return !color_.empty(); }
  std::size_t voxel_count() const { return tsdf_.size(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
  }
  Vec3 voxel_position(int i, int j, int k) const {
    return origin_ + voxel_size_ * Vec3(i, j, k);
  }
  // Upper corner of the sampled region.
  Vec3 max_corner() const {
    return voxel_position(dims_[0] - 1, dims_[1] - 1, dims_[2] - 1);
  }

  double tsdf(int i, int j, int k) const { return tsdf_[index(i, j, k)]; }
  double weight(int i, int j, int k) const { return weight_[index(i, j, k)]; }
  // RGB in [0, 1]; requires has_color().
  Vec3 color(int i, int j, int k) const;

  // Direct write, used to load analytic fields. `value` is clamped to
  // [-trunc, trunc].
  void set(int i, int j, int k, double value, double weight);

  std::span<const double> tsdf_data() const { return tsdf_; }
  std::span<const double> weight_data() const { return weight_; }

  // Sequential-average update with projective distances from one depth map.
  // pose_world maps camera coordinates to world coordinates.
  void integrate(const DepthImage& depth, const RgbImage* color,
                 const PinholeCamera& cam, const Pose& pose_world);

  static std::size_t bytes_required(std::array<int, 3> dims, bool with_color);

 private:
  Vec3 origin_;
  double voxel_size_;
  std::array<int, 3> dims_;
  double trunc_;
  std::vector<double> tsdf_;
  std::vector<double> weight_;
  std::vector<double> color_;  // interleaved RGB, empty without color
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::int32_t, 3>> triangles;
  std::vector<Vec3> colors;  // per vertex, empty when uncolored

  bool empty() const { return triangles.empty(); }
};

// Marching cubes over the zero level set. Cubes with an unobserved corner are
// skipped. Triangles come out in cube-index order (x fastest) and face from
// negative to positive distances.
TriangleMesh extract_mesh(const TsdfVolume& vol);

struct VolumeBounds {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool operator==(const VolumeBounds&) const = default;
};

struct FusionConfig {
  double voxel_size = 0.01;
  // Truncation distance; 4 * voxel_size when unset.
  std::optional<double> trunc;
  std::size_t memory_cap_bytes = std::size_t(2) << 30;
  // Computed from the back-projected depth maps plus a trunc margin when unset.
  std::optional<VolumeBounds> bounds;
  bool use_color = true;

  double truncation() const { return trunc.value_or(4.0 * voxel_size); }
  void validate() const;
  bool operator==(const FusionConfig&) const = default;
};

// One registered depth map ready for integration.
struct FusionView {
  const DepthImage* depth = nullptr;
  const RgbImage* color = nullptr;
  PinholeCamera camera;
  Pose pose_world;
};

struct FusionStats {
  std::array<int, 3> dims{0, 0, 0};
  std::size_t voxel_count = 0;
  int views_integrated = 0;
  double integration_seconds = 0.0;
  double extraction_seconds = 0.0;
};

VolumeBounds compute_bounds(std::span<const FusionView> views, double margin);

// Allocates the grid for `cfg`, integrating every view. Throws
// Error(kMemoryCap) naming the grid size when it would exceed the cap, and
// Error(kInvalidArgument) for an empty view list.
TsdfVolume integrate_views(std::span<const FusionView> views, const FusionConfig& cfg,
                           FusionStats* stats = nullptr);

TriangleMesh fuse_views(std::span<const FusionView> views, const FusionConfig& cfg,
                        FusionStats* stats = nullptr);

// Level-0 depth of every keyframe, placed by its world pose.
TriangleMesh fuse_keyframes(std::span<const Keyframe> keyframes,
                            const FusionConfig& cfg, FusionStats* stats = nullptr);

}  // namespace endovo
