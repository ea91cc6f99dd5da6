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
#include <string>
#include <vector>

#include "endovo/eval.hpp"
#include "endovo/fusion.hpp"
#include "endovo/io.hpp"
#include "endovo/synth.hpp"
#include "endovo/tracking.hpp"

namespace endovo {

// Camera model plus the raw-to-meters factor of the 16-bit depth PNGs.
struct Intrinsics {
  PinholeCamera camera;
  double depth_scale = 1e-3;

  bool operator==(const Intrinsics&) const = default;
};

Intrinsics parse_intrinsics(const std::string& json_text);
Intrinsics load_intrinsics(const fs::path& path);
std::string intrinsics_to_json(const Intrinsics& intrinsics);

struct ManifestFrame {
  double timestamp = 0.0;
  fs::path rgb;  // absolute or relative to the working directory
  fs::path depth;
};

// A sequence on disk:
//   {"intrinsics": "intrinsics.json",
//    "frames": [{"timestamp": 0.0, "rgb": "frames/000000.png",
//                "depth": "depth/000000.png"}, ...]}
// Relative paths are resolved against the manifest's directory.
struct SequenceManifest {
  fs::path root;
  Intrinsics intrinsics;
  std::vector<ManifestFrame> frames;
};

// Checks that every referenced file exists, timestamps increase and image
// sizes match the intrinsics. Throws Error(kConfig) naming the first problem,
// or Error(kIo) when the manifest itself cannot be read.
SequenceManifest load_manifest(const fs::path& path);

// Loads one frame: intensity from the RGB image, color kept, depth scaled to
// meters.
PseudoRgbdFrame load_frame(const SequenceManifest& manifest, std::size_t index);

struct EvalConfig {
  ScaleMode scale = ScaleMode::kMedianRatio;
  // Unit of reported rmse and sq_rel: "m" or "mm".
  std::string units = "m";

  bool operator==(const EvalConfig&) const = default;
};

struct PipelineConfig {
  TrackerConfig tracker;
  FusionConfig fusion;
  EvalConfig eval;

  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

// Sections and keys are optional; unknown keys raise Error(kConfig) naming
// the key, e.g. "tracker.gama".
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const fs::path& path);
// Complete effective configuration; parse_config inverts it exactly.
std::string config_to_json(const PipelineConfig& cfg);

struct TrackSummary {
  int frames = 0;
  int frames_processed = 0;
  int keyframes = 0;
  std::optional<int> failure_frame;
  double mean_tracking_ms = 0.0;
};

// Runs odometry and writes into out_dir: trajectory.txt (TUM),
// keyframes.json, diagnostics.json, timing.json and config.json. Every file
// except timing.json is a pure function of the inputs.
TrackSummary cmd_track(const fs::path& manifest_path, const PipelineConfig& cfg,
                       const fs::path& out_dir);

struct FuseSummary {
  FusionStats stats;
  std::size_t vertex_count = 0;
  std::size_t triangle_count = 0;
};

// Integrates the depth maps of the listed keyframes at the trajectory poses
// (matched by timestamp). Writes the mesh, <stem>_report.json and
// <stem>_timing.json next to it.
FuseSummary cmd_fuse(const fs::path& manifest_path, const fs::path& keyframes_path,
                     const fs::path& trajectory_path, const PipelineConfig& cfg,
                     const fs::path& out_mesh);

struct EvalSummary {
  std::vector<std::string> names;
  std::vector<DepthMetrics> per_image;
  DepthMetrics aggregate;
};

// Compares same-named 16-bit depth PNGs in two directories. Writes the JSON
// report and a CSV with the same stem. Throws Error(kInvalidArgument) listing
// files present in only one directory.
EvalSummary cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir,
                     const EvalConfig& cfg, double depth_scale,
                     const fs::path& out_json);

// Scene description for the generator; see parse_scene for the JSON layout.
struct SceneDescription {
  SyntheticScene scene;
  PinholeCamera camera;
  std::vector<Pose> trajectory;
  NoiseConfig noise;
  double depth_scale = 1e-4;
  double fps = kDefaultFps;
};

SceneDescription parse_scene(const std::string& json_text);

// Writes frames/NNNNNN.png, depth/NNNNNN.png, intrinsics.json,
// groundtruth.txt and manifest.json.
void write_sequence(const SyntheticSequence& seq, const Intrinsics& intrinsics,
                    const fs::path& out_dir);

// Returns the number of frames written.
int cmd_synth(const fs::path& scene_path, const fs::path& out_dir, std::uint64_t seed);

}  // namespace endovo
