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

// endovo command line: track, fuse, eval and synth over pseudo-RGBD sequences.
//
// Exit codes: 0 success, 1 internal or degenerate input, 2 tracking failure,
// 3 configuration or usage error, 4 i/o error.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <string>

#include "endovo/endovo.h"

namespace {

enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitTrackingFailure = 2,
  kExitConfig = 3,
  kExitIo = 4,
};

int exit_code(endovo_status status) {
  switch (status) {
    case ENDOVO_OK:
      return kExitOk;
    case ENDOVO_ERR_TRACKING_FAILURE:
      return kExitTrackingFailure;
    case ENDOVO_ERR_CONFIG:
    case ENDOVO_ERR_INVALID_ARGUMENT:
    case ENDOVO_ERR_MEMORY_CAP:
      return kExitConfig;
    case ENDOVO_ERR_IO:
      return kExitIo;
    default:
      return kExitInternal;
  }
}

int report(endovo_status status) {
  if (status != ENDOVO_OK) {
    std::fprintf(stderr, "endovo: %s: %s\n", endovo_status_string(status),
                 endovo_last_error());
  }
  return exit_code(status);
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photometric keyframe odometry, TSDF fusion and depth evaluation"};
  app.set_version_flag("--version", std::string(endovo_version()));
  app.require_subcommand(1);

  std::string manifest, config, out, keyframes, trajectory, pred, gt, scale, units, scene;
  double depth_scale = 1e-3;
  std::uint64_t seed = 0;

  CLI::App* track = app.add_subcommand("track", "Track a sequence against keyframes");
  track->add_option("--manifest", manifest, "Sequence manifest (JSON)")
      ->required();
  track->add_option("--config", config, "Pipeline config (JSON)");
  track->add_option("--out", out, "Output directory")->required();

  CLI::App* fuse = app.add_subcommand("fuse", "Fuse keyframe depth into a mesh");
  fuse->add_option("--manifest", manifest, "Sequence manifest (JSON)")
      ->required();
  fuse->add_option("--keyframes", keyframes, "keyframes.json from track")
      ->required();
  fuse->add_option("--trajectory", trajectory, "TUM trajectory")
      ->required();
  fuse->add_option("--config", config, "Pipeline config (JSON)");
  fuse->add_option("--out", out, "Output PLY mesh")->required();

  CLI::App* eval = app.add_subcommand("eval", "Compare predicted and reference depth");
  eval->add_option("--pred", pred, "Directory of predicted 16-bit depth PNGs")
      ->required();
  eval->add_option("--gt", gt, "Directory of reference 16-bit depth PNGs")
      ->required();
  eval->add_option("--scale", scale, "Scale alignment")
      ->check(CLI::IsMember({"none", "median_ratio", "ratio_median"}));
  eval->add_option("--units", units, "Units of rmse and sq_rel")
      ->check(CLI::IsMember({"m", "mm"}));
  eval->add_option("--depth-scale", depth_scale, "Meters per raw depth unit")
      ->capture_default_str();
  eval->add_option("--config", config, "Pipeline config (JSON)");
  eval->add_option("--out", out, "Output report (JSON; CSV written alongside)")->required();

  CLI::App* synth = app.add_subcommand("synth", "Render a synthetic sequence");
  synth->add_option("--scene", scene, "Scene description (JSON)")
      ->required();
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--seed", seed, "Noise seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*track) {
    endovo_track_summary s{};
    const endovo_status status = endovo_track(manifest.c_str(), or_null(config), out.c_str(), &s);
    if (status == ENDOVO_OK || status == ENDOVO_ERR_TRACKING_FAILURE) {
      std::printf("frames %d/%d, keyframes %d, %.1f ms/frame", s.frames_processed, s.frames,
                  s.keyframes, s.mean_tracking_ms);
      if (s.failure_frame >= 0) std::printf(", failure at frame %d", s.failure_frame);
      std::printf("\n");
    }
    return report(status);
  }
  if (*fuse) {
    endovo_fuse_summary s{};
    const endovo_status status =
        endovo_fuse(manifest.c_str(), keyframes.c_str(), trajectory.c_str(),
                    or_null(config), out.c_str(), &s);
    if (status == ENDOVO_OK) {
      std::printf("grid %dx%dx%d (%llu voxels), %d views in %.2f s, %llu triangles\n",
                  s.dims[0], s.dims[1], s.dims[2],
                  static_cast<unsigned long long>(s.voxel_count), s.views_integrated,
                  s.integration_seconds, static_cast<unsigned long long>(s.triangle_count));
    }
    return report(status);
  }
  if (*eval) {
    endovo_depth_metrics m{};
    const endovo_status status =
        endovo_eval(pred.c_str(), gt.c_str(), or_null(config), or_null(scale),
                    or_null(units), depth_scale, out.c_str(), &m);
    if (status == ENDOVO_OK) {
      std::printf("abs_rel %.4f  sq_rel %.4f  rmse %.4f  rmse_log %.4f  "
                  "d1 %.4f  d2 %.4f  d3 %.4f\n",
                  m.abs_rel, m.sq_rel, m.rmse, m.rmse_log, m.delta1, m.delta2, m.delta3);
    }
    return report(status);
  }
  int frames = 0;
  const endovo_status status = endovo_synth(scene.c_str(), out.c_str(), seed, &frames);
  if (status == ENDOVO_OK) std::printf("wrote %d frames to %s\n", frames, out.c_str());
  return report(status);
}
