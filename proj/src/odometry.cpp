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

#include <chrono>

#include "endovo/error.hpp"
#include "endovo/log.hpp"
#include "endovo/tracking.hpp"

namespace endovo {

Odometry::Odometry(const PinholeCamera& camera, const TrackerConfig& cfg)
    : camera_(camera), cfg_(cfg) {
  camera_.validate();
  cfg_.validate();
}

const FrameDiagnostics& Odometry::add_frame(const PseudoRgbdFrame& frame) {
  if (failed()) {
    throw Error(ErrorCode::kInvalidArgument, "odometry already failed");
  }
  const auto start = std::chrono::steady_clock::now();
  const int frame_id = static_cast<int>(result_.trajectory.size());
  ImagePyramid pyramid(frame.intensity, frame.depth, camera_, cfg_.pyramid_levels);

  FrameDiagnostics diag;
  diag.frame_id = frame_id;

  if (result_.keyframes.empty()) {
    try {
      result_.keyframes.emplace_back(frame_id, std::move(pyramid), Pose::identity(),
                                     frame.color);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInitialization,
                  std::string("first frame cannot start odometry: ") + e.what());
    }
    diag.keyframe_id = frame_id;
    diag.new_keyframe = true;
    diag.iterations.assign(cfg_.pyramid_levels, 0);
    result_.trajectory.push_back({frame_id, frame.timestamp, Pose::identity()});
  } else {
    const Keyframe& kf = result_.keyframes.back();
    diag.keyframe_id = kf.id();
    const Pose init = motion_ * pose_ck_;
    TrackResult tr;
    try {
      tr = track_frame(kf, pyramid, init, cfg_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateFrame &&
          e.code() != ErrorCode::kDegenerateGeometry) {
        throw;
      }
      log(LogLevel::kWarn, "frame %d: %s", frame_id, e.what());
      tr.pose_ck = init;
      tr.converged = false;
      tr.overlap_ratio = 0.0;
      tr.inlier_ratio = 0.0;
      tr.iterations_per_level.assign(cfg_.pyramid_levels, 0);
    }
    diag.converged = tr.converged;
    diag.overlap_ratio = tr.overlap_ratio;
    diag.inlier_ratio = tr.inlier_ratio;
    diag.final_cost = tr.final_cost;
    diag.iterations = tr.iterations_per_level;

    const Pose pose_world = kf.pose_world() * tr.pose_ck.inverse();
    result_.trajectory.push_back({frame_id, frame.timestamp, pose_world});
    motion_ = tr.pose_ck * pose_ck_.inverse();
    pose_ck_ = tr.pose_ck;

    if (tr.converged) {
      failure_streak_ = 0;
      if (tr.overlap_ratio < cfg_.keyframe_ratio) {
        try {
          result_.keyframes.emplace_back(frame_id, std::move(pyramid), pose_world,
                                         frame.color);
          pose_ck_ = Pose::identity();
          diag.new_keyframe = true;
        } catch (const Error& e) {
          log(LogLevel::kWarn, "frame %d not promoted: %s", frame_id, e.what());
        }
      }
    } else if (++failure_streak_ >= cfg_.failure_patience) {
      result_.failure_frame = frame_id - cfg_.failure_patience + 1;
    }
  }

  diag.tracking_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  log(LogLevel::kDebug, "frame %d kf=%d overlap=%.3f inliers=%.3f cost=%.4f%s",
      frame_id, diag.keyframe_id, diag.overlap_ratio, diag.inlier_ratio,
      diag.final_cost, diag.converged ? "" : " FAILED");
  result_.diagnostics.push_back(std::move(diag));
  return result_.diagnostics.back();
}

OdometryResult run_odometry(std::span<const PseudoRgbdFrame> frames,
                            const PinholeCamera& camera, const TrackerConfig& cfg) {
  if (frames.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "run_odometry: no frames");
  }
  Odometry odometry(camera, cfg);
  for (const PseudoRgbdFrame& frame : frames) {
    odometry.add_frame(frame);
    if (odometry.failed()) break;
  }
  return odometry.take_result();
}

}  // namespace endovo
