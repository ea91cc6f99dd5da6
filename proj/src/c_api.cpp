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

#include "endovo/endovo.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <optional>
#include <string>

#include "endovo/error.hpp"
#include "endovo/eval.hpp"
#include "endovo/fusion.hpp"
#include "endovo/geom.hpp"
#include "endovo/log.hpp"
#include "endovo/pipeline.hpp"

struct endovo_volume {
  endovo::TsdfVolume volume;
};

struct endovo_mesh {
  endovo::TriangleMesh mesh;
};

namespace {

using namespace endovo;

thread_local std::string g_last_error;

endovo_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidDepth:
      return ENDOVO_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDegenerateFrame:
    case ErrorCode::kDegenerateGeometry:
    case ErrorCode::kInitialization:
      return ENDOVO_ERR_DEGENERATE;
    case ErrorCode::kConfig:
      return ENDOVO_ERR_CONFIG;
    case ErrorCode::kIo:
      return ENDOVO_ERR_IO;
    case ErrorCode::kMemoryCap:
      return ENDOVO_ERR_MEMORY_CAP;
  }
  return ENDOVO_ERR_INTERNAL;
}

endovo_status fail(endovo_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
endovo_status guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(ENDOVO_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ENDOVO_ERR_MEMORY_CAP, "out of memory");
  } catch (const std::exception& e) {
    return fail(ENDOVO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ENDOVO_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

PipelineConfig config_from(const char* path) {
  return path ? load_config(path) : PipelineConfig{};
}

Mat4 read_matrix(const double* m) {
  return Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(m);
}

// Rigid transforms only: orthonormal rotation with det +1, last row 0 0 0 1.
Pose read_pose(const double* m) {
  const Mat4 a = read_matrix(m);
  require(a.allFinite(), "pose matrix has non-finite entries");
  require((a.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() < 1e-9,
          "pose matrix last row must be 0 0 0 1");
  const Pose p = Pose::from_matrix(a);
  require(p.orthonormality_error() < 1e-6 && p.rotation().determinant() > 0.0,
          "pose rotation is not a rotation matrix");
  return p;
}

void write_matrix(const Mat4& m, double* out) {
  Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> dst(out);
  dst = m;
}

DepthImage image_from(const double* data, int width, int height) {
  require(data != nullptr, "image data is null");
  require(width > 0 && height > 0, "image size must be positive");
  const std::size_t n = std::size_t(width) * height;
  return DepthImage(width, height, std::vector<double>(data, data + n));
}

ScaleMode scale_from(const char* text) {
  require(text != nullptr, "scale_mode is null");
  const auto mode = parse_scale_mode(text);
  if (!mode) {
    throw Error(ErrorCode::kInvalidArgument, std::string("unknown scale mode '") + text + "'");
  }
  return *mode;
}

void copy_metrics(const DepthMetrics& m, endovo_depth_metrics* out) {
  out->abs_rel = m.abs_rel;
  out->sq_rel = m.sq_rel;
  out->rmse = m.rmse;
  out->rmse_log = m.rmse_log;
  out->delta1 = m.delta1;
  out->delta2 = m.delta2;
  out->delta3 = m.delta3;
  out->n_pixels = m.n_pixels;
  out->n_log_excluded = m.n_log_excluded;
}

}  // namespace

extern "C" {

const char* endovo_version(void) { return "0.1.0"; }

const char* endovo_status_string(endovo_status status) {
  switch (status) {
    case ENDOVO_OK: return "ok";
    case ENDOVO_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ENDOVO_ERR_CONFIG: return "configuration error";
    case ENDOVO_ERR_IO: return "i/o error";
    case ENDOVO_ERR_DEGENERATE: return "degenerate input";
    case ENDOVO_ERR_TRACKING_FAILURE: return "tracking failure";
    case ENDOVO_ERR_MEMORY_CAP: return "memory cap exceeded";
    case ENDOVO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* endovo_last_error(void) { return g_last_error.c_str(); }

void endovo_set_log_level(endovo_log_level level) {
  set_log_threshold(static_cast<LogLevel>(level));
}

endovo_status endovo_track(const char* manifest_path, const char* config_path,
                           const char* out_dir, endovo_track_summary* summary) {
  return guarded([&] {
    require(manifest_path && out_dir, "manifest_path and out_dir are required");
    const TrackSummary s = cmd_track(manifest_path, config_from(config_path), out_dir);
    if (summary) {
      summary->frames = s.frames;
      summary->frames_processed = s.frames_processed;
      summary->keyframes = s.keyframes;
      summary->failure_frame = s.failure_frame.value_or(-1);
      summary->mean_tracking_ms = s.mean_tracking_ms;
    }
    if (s.failure_frame) {
      return fail(ENDOVO_ERR_TRACKING_FAILURE,
                  "tracking failed at frame " + std::to_string(*s.failure_frame));
    }
    return ENDOVO_OK;
  });
}

endovo_status endovo_fuse(const char* manifest_path, const char* keyframes_path,
                          const char* trajectory_path, const char* config_path,
                          const char* out_mesh, endovo_fuse_summary* summary) {
  return guarded([&] {
    require(manifest_path && keyframes_path && trajectory_path && out_mesh,
            "manifest, keyframes, trajectory and output paths are required");
    const FuseSummary s = cmd_fuse(manifest_path, keyframes_path, trajectory_path,
                                   config_from(config_path), out_mesh);
    if (summary) {
      for (int i = 0; i < 3; ++i) summary->dims[i] = s.stats.dims[i];
      summary->voxel_count = s.stats.voxel_count;
      summary->views_integrated = s.stats.views_integrated;
      summary->vertex_count = s.vertex_count;
      summary->triangle_count = s.triangle_count;
      summary->integration_seconds = s.stats.integration_seconds;
      summary->extraction_seconds = s.stats.extraction_seconds;
    }
    return ENDOVO_OK;
  });
}

endovo_status endovo_eval(const char* pred_dir, const char* gt_dir, const char* config_path,
                          const char* scale_mode, const char* units, double depth_scale,
                          const char* out_json, endovo_depth_metrics* aggregate) {
  return guarded([&] {
    require(pred_dir && gt_dir && out_json, "pred_dir, gt_dir and out_json are required");
    EvalConfig cfg = config_from(config_path).eval;
    if (scale_mode) cfg.scale = scale_from(scale_mode);
    if (units) cfg.units = units;
    const EvalSummary s = cmd_eval(pred_dir, gt_dir, cfg, depth_scale, out_json);
    if (aggregate) copy_metrics(s.aggregate, aggregate);
    return ENDOVO_OK;
  });
}

endovo_status endovo_synth(const char* scene_path, const char* out_dir, uint64_t seed,
                           int* frames_written) {
  return guarded([&] {
    require(scene_path && out_dir, "scene_path and out_dir are required");
    const int n = cmd_synth(scene_path, out_dir, seed);
    if (frames_written) *frames_written = n;
    return ENDOVO_OK;
  });
}

endovo_status endovo_se3_exp(const double twist[6], double matrix[16]) {
  return guarded([&] {
    require(twist && matrix, "null argument");
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = twist[i];
    write_matrix(exp_se3(Twist::from_vector(v)).matrix(), matrix);
    return ENDOVO_OK;
  });
}

endovo_status endovo_se3_log(const double matrix[16], double twist[6], int* near_singular) {
  return guarded([&] {
    require(matrix && twist, "null argument");
    const TwistLog log = log_se3_checked(read_pose(matrix));
    const Vec6 v = log.twist.vector();
    for (int i = 0; i < 6; ++i) twist[i] = v[i];
    if (near_singular) *near_singular = log.near_singular ? 1 : 0;
    return ENDOVO_OK;
  });
}

endovo_status endovo_depth_metrics_compute(const double* pred, const double* gt, int width,
                                           int height, const char* scale_mode,
                                           endovo_depth_metrics* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    const DepthMetrics m = depth_metrics(image_from(pred, width, height),
                                         image_from(gt, width, height),
                                         scale_from(scale_mode));
    copy_metrics(m, out);
    return ENDOVO_OK;
  });
}

endovo_status endovo_volume_create(const double origin[3], double voxel_size,
                                   const int dims[3], double trunc, endovo_volume** out) {
  return guarded([&] {
    require(origin && dims && out, "null argument");
    *out = new endovo_volume{TsdfVolume(Vec3(origin[0], origin[1], origin[2]), voxel_size,
                                        {dims[0], dims[1], dims[2]}, trunc)};
    return ENDOVO_OK;
  });
}

void endovo_volume_destroy(endovo_volume* volume) { delete volume; }

endovo_status endovo_volume_integrate(endovo_volume* volume, const double* depth, int width,
                                      int height, const double intrinsics[4],
                                      const double pose_world[16]) {
  return guarded([&] {
    require(volume && intrinsics && pose_world, "null argument");
    const DepthImage d = image_from(depth, width, height);
    PinholeCamera cam{intrinsics[0], intrinsics[1], intrinsics[2], intrinsics[3],
                      width, height};
    volume->volume.integrate(d, nullptr, cam, read_pose(pose_world));
    return ENDOVO_OK;
  });
}

endovo_status endovo_volume_extract_mesh(const endovo_volume* volume, endovo_mesh** out) {
  return guarded([&] {
    require(volume && out, "null argument");
    *out = new endovo_mesh{extract_mesh(volume->volume)};
    return ENDOVO_OK;
  });
}

size_t endovo_mesh_vertex_count(const endovo_mesh* mesh) {
  return mesh ? mesh->mesh.vertices.size() : 0;
}

size_t endovo_mesh_triangle_count(const endovo_mesh* mesh) {
  return mesh ? mesh->mesh.triangles.size() : 0;
}

endovo_status endovo_mesh_vertices(const endovo_mesh* mesh, double* xyz) {
  return guarded([&] {
    require(mesh && xyz, "null argument");
    for (const Vec3& p : mesh->mesh.vertices) {
      *xyz++ = p.x();
      *xyz++ = p.y();
      *xyz++ = p.z();
    }
    return ENDOVO_OK;
  });
}

endovo_status endovo_mesh_triangles(const endovo_mesh* mesh, int32_t* indices) {
  return guarded([&] {
    require(mesh && indices, "null argument");
    for (const auto& t : mesh->mesh.triangles) {
      std::memcpy(indices, t.data(), sizeof(int32_t) * 3);
      indices += 3;
    }
    return ENDOVO_OK;
  });
}

endovo_status endovo_mesh_write_ply(const endovo_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh && path, "null argument");
    write_ply(path, mesh->mesh);
    return ENDOVO_OK;
  });
}

void endovo_mesh_destroy(endovo_mesh* mesh) { delete mesh; }

}  // extern "C"
