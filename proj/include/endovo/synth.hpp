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
#include <optional>
#include <vector>

#include "endovo/geom.hpp"
#include "endovo/image.hpp"
#include "endovo/tracking.hpp"

namespace endovo {

// Solid texture: base + sum of sinusoidal plane waves evaluated at the 3-D
// hit point, clamped to [0, 1]. Smooth whenever the sum stays inside [0, 1].
struct Texture {
  struct Wave {
    double amplitude = 0.0;
    Vec3 direction = Vec3::UnitX();  // normalized on use
    double frequency = 1.0;          // cycles per scene unit
    double phase = 0.0;              // radians
  };

  double base = 0.5;
  std::vector<Wave> waves;

  double evaluate(const Vec3& p) const;
  // Spatial gradient of the unclamped field.
  Vec3 gradient(const Vec3& p) const;
  // Throws Error(kInvalidArgument) when the field can leave [0, 1].
  void validate() const;
};

struct Primitive {
  enum class Kind { kPlane, kSphere };

  Kind kind = Kind::kPlane;
  Vec3 point = Vec3::Zero();  // plane point or sphere center
  Vec3 normal = Vec3::UnitZ();
  double radius = 1.0;
  Texture texture;

  static Primitive plane(const Vec3& point, const Vec3& normal, Texture texture);
  static Primitive sphere(const Vec3& center, double radius, Texture texture);

  // Smallest ray parameter t > 0 with origin + t * dir on the surface.
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir) const;
};

struct SyntheticScene {
  std::vector<Primitive> primitives;

  void validate() const;
};

struct RenderedView {
  GrayImage intensity;
  DepthImage depth;
};

// Ray cast through every pixel center. Misses get intensity 0 and invalid
// depth.
RenderedView render(const SyntheticScene& scene, const PinholeCamera& cam,
                    const Pose& pose_world);

struct NoiseConfig {
  // Gaussian depth noise with sigma = depth_sigma + depth_sigma_relative * d.
  double depth_sigma = 0.0;
  double depth_sigma_relative = 0.0;
  double intensity_sigma = 0.0;
  // When replace_depth_max > 0, valid depth is replaced by values drawn
  // uniformly from [replace_depth_min, replace_depth_max] before any
  // Gaussian noise is added.
  double replace_depth_min = 0.0;
  double replace_depth_max = 0.0;
  // Frames before this index stay noise-free.
  int start_frame = 0;

  bool replaces_depth() const { return replace_depth_max > 0.0; }
  bool any() const {
    return depth_sigma > 0.0 || depth_sigma_relative > 0.0 || intensity_sigma > 0.0 ||
           replaces_depth();
  }
};

struct SyntheticSequence {
  std::vector<PseudoRgbdFrame> frames;
  std::vector<Pose> ground_truth;  // world-from-camera
};

inline constexpr double kDefaultFps = 30.0;

// Renders every pose, then adds seeded noise (depth kept positive, intensity
// clamped to [0, 1]). Frame i gets timestamp i / fps.
SyntheticSequence generate_sequence(const SyntheticScene& scene,
                                    const PinholeCamera& cam,
                                    const std::vector<Pose>& trajectory,
                                    const NoiseConfig& noise, std::uint64_t seed,
                                    double fps = kDefaultFps);

// Camera at `eye` looking at `target`; image y points along -up.
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

// Circle of `radius` around `center` in the plane orthogonal to `axis`,
// advancing `step_rad` per frame. With outward = true the camera looks away
// from the center, otherwise at it.
std::vector<Pose> orbit_trajectory(const Vec3& center, const Vec3& axis,
                                   double radius, double start_rad, double step_rad,
                                   int frames, bool outward);

// Repeatedly applies a fixed camera-frame motion to `start`.
std::vector<Pose> constant_motion_trajectory(const Pose& start, const Pose& step,
                                             int frames);

}  // namespace endovo
