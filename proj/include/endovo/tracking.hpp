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
#include <vector>

#include "endovo/geom.hpp"
#include "endovo/image.hpp"
#include "endovo/imgproc.hpp"

namespace endovo {

struct TrackerConfig {
  int pyramid_levels = 4;
  // Residual saturation threshold, intensity units.
  double gamma = 0.1;
  int max_iterations = 50;
  // A level stops once the Gauss-Newton step norm drops below this.
  double convergence_eps = 1e-6;
  // A new keyframe is created when the overlap ratio drops below this.
  double keyframe_ratio = 0.5;
  int min_valid_pixels = 50;
  // Tracking is reported as failed below these level-0 ratios.
  double min_overlap = 0.05;
  double min_inlier_ratio = 0.5;
  // Consecutive failed frames that terminate odometry.
  int failure_patience = 3;

  void validate() const;
  bool operator==(const TrackerConfig&) const = default;
};

// Keyframe pixel with valid depth, cached per pyramid level.
struct KeyPoint {
  int u = 0;
  int v = 0;
  double intensity = 0.0;
  Vec3 point = Vec3::Zero();  // keyframe coordinates
};

class Keyframe {
 public:
  Keyframe(int id, ImagePyramid pyramid, const Pose& pose_world,
           std::optional<RgbImage> color = std::nullopt);

  int id() const { return id_; }
  const ImagePyramid& pyramid() const { return pyramid_; }
  const Pose& pose_world() const { return pose_world_; }
  const std::optional<RgbImage>& color() const { return color_; }
  const DepthImage& depth() const { return *pyramid_.level(0).depth; }
  const PinholeCamera& camera(int level = 0) const {
    return pyramid_.level(level).camera;
  }
  std::span<const KeyPoint> points(int level) const { return points_.at(level); }

 private:
  int id_;
  ImagePyramid pyramid_;
  Pose pose_world_;
  std::optional<RgbImage> color_;
  std::vector<std::vector<KeyPoint>> points_;
};

struct CostResult {
  // Sum of min(|r|, gamma) over valid pixels.
  double cost = 0.0;
  int valid_count = 0;
  int unsaturated_count = 0;
  // Keyframe pixels with valid depth at this level.
  int total_count = 0;
  int in_view_count = 0;
  // Signed residual I_k(p) - I_c(p'), NaN where the pixel was excluded.
  GrayImage residuals;

  double mean_cost() const { return valid_count ? cost / valid_count : 0.0; }
  double overlap_ratio() const {
    return total_count ? double(in_view_count) / total_count : 0.0;
  }
  double inlier_ratio() const {
    return valid_count ? double(unsaturated_count) / valid_count : 0.0;
  }
};

// Saturated photometric cost of warping keyframe pixels into `frame` (an
// image at pyramid level `level`) under pose_ck (keyframe -> current).
// Throws Error(kDegenerateFrame) when no pixel is valid.
CostResult photometric_cost(const Keyframe& kf, const GrayImage& frame,
                            const Pose& pose_ck, int level, double gamma);

// Residual and its derivative with respect to a left twist perturbation
// exp(psi) * pose_ck, ordered (omega, nu).
struct ResidualJacobian {
  int u = 0;
  int v = 0;
  double residual = 0.0;
  Vec6 jacobian = Vec6::Zero();
  Vec2 warped = Vec2::Zero();
};

std::vector<ResidualJacobian> photometric_jacobian(const Keyframe& kf,
                                                   const GrayImage& frame,
                                                   const Pose& pose_ck, int level);

enum class Dof { kRotationOnly, kFull };

struct LevelDiagnostics {
  int iterations = 0;
  bool converged = false;
  double initial_cost = 0.0;  // mean saturated residual
  double final_cost = 0.0;
  // Mean cost after each accepted step, starting with the initial cost.
  std::vector<double> cost_history;
};

struct LevelResult {
  Pose pose;
  LevelDiagnostics diagnostics;
};

// Robust Gauss-Newton at one pyramid level. Saturated pixels get zero weight;
// updates are composed on the left. Steps that raise the mean cost are halved
// up to five times. Throws Error(kDegenerateGeometry) when the normal matrix is
// singular (condition number above 1e12).
LevelResult gauss_newton_level(const Keyframe& kf, const GrayImage& frame,
                               const Pose& init, int level, Dof dof,
                               const TrackerConfig& cfg);

struct TrackResult {
  Pose pose_ck;
  double overlap_ratio = 0.0;
  double inlier_ratio = 0.0;
  int valid_count = 0;
  double final_cost = 0.0;  // mean saturated residual at level 0
  bool converged = false;
  std::vector<int> iterations_per_level;  // index = pyramid level
};

// Coarse-to-fine tracking: rotation only at the coarsest level, full SE(3)
// on every finer one.
TrackResult track_frame(const Keyframe& kf, const ImagePyramid& frame,
                        const Pose& init, const TrackerConfig& cfg);

// RGB image plus dense depth, treated as an RGB-D frame.
struct PseudoRgbdFrame {
  double timestamp = 0.0;
  GrayImage intensity;
  DepthImage depth;
  std::optional<RgbImage> color;
};

struct TrajectoryEntry {
  int frame_id = 0;
  double timestamp = 0.0;
  Pose pose_world;  // world-from-camera
};

struct FrameDiagnostics {
  int frame_id = 0;
  int keyframe_id = 0;  // keyframe the frame was tracked against
  bool new_keyframe = false;
  bool converged = true;
  double overlap_ratio = 1.0;
  double inlier_ratio = 1.0;
  double final_cost = 0.0;
  std::vector<int> iterations;
  double tracking_ms = 0.0;
};

struct OdometryResult {
  std::vector<TrajectoryEntry> trajectory;
  std::vector<Keyframe> keyframes;
  std::vector<FrameDiagnostics> diagnostics;
  // First frame of the failing streak that stopped tracking.
  std::optional<int> failure_frame;
};

// Sequential frame-to-keyframe odometry with constant-motion prediction.
class Odometry {
 public:
  Odometry(const PinholeCamera& camera, const TrackerConfig& cfg);

  // Returns the diagnostics of the processed frame. Must not be called after
  // failed() turns true.
  const FrameDiagnostics& add_frame(const PseudoRgbdFrame& frame);

  bool failed() const { return result_.failure_frame.has_value(); }
  const OdometryResult& result() const { return result_; }
  OdometryResult take_result() { return std::move(result_); }

 private:
  PinholeCamera camera_;
  TrackerConfig cfg_;
  OdometryResult result_;
  Pose pose_ck_;  // last frame relative to the current keyframe
  Pose motion_;   // last frame-to-frame motion (previous -> current)
  int failure_streak_ = 0;
};

OdometryResult run_odometry(std::span<const PseudoRgbdFrame> frames,
                            const PinholeCamera& camera, const TrackerConfig& cfg);

}  // namespace endovo
