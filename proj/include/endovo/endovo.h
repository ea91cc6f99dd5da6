/*
 * Copyright 2026 The Endovo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ENDOVO_ENDOVO_H_
#define ENDOVO_ENDOVO_H_

/* C interface of the endovo shared library.
 *
 * Every function returning endovo_status reports failures through the code and
 * leaves a human readable message in endovo_last_error(), which is thread
 * local and valid until the next failing call on the same thread. Output
 * arguments are only written on success.
 *
 * Matrices are 4x4 row-major. Twists are ordered (omega_x, omega_y, omega_z,
 * nu_x, nu_y, nu_z). Images are row-major arrays of doubles; depth 0 marks an
 * invalid pixel. Paths are UTF-8. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ENDOVO_BUILDING_LIBRARY)
#    define ENDOVO_API __declspec(dllexport)
#  else
#    define ENDOVO_API __declspec(dllimport)
#  endif
#else
#  define ENDOVO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum endovo_status {
  ENDOVO_OK = 0,
  ENDOVO_ERR_INVALID_ARGUMENT = 1,
  ENDOVO_ERR_CONFIG = 2,
  ENDOVO_ERR_IO = 3,
  ENDOVO_ERR_DEGENERATE = 4,
  ENDOVO_ERR_TRACKING_FAILURE = 5,
  ENDOVO_ERR_MEMORY_CAP = 6,
  ENDOVO_ERR_INTERNAL = 7
} endovo_status;

typedef enum endovo_log_level {
  ENDOVO_LOG_ERROR = 0,
  ENDOVO_LOG_WARN = 1,
  ENDOVO_LOG_INFO = 2,
  ENDOVO_LOG_DEBUG = 3
} endovo_log_level;

ENDOVO_API const char* endovo_version(void);
ENDOVO_API const char* endovo_status_string(endovo_status status);
ENDOVO_API const char* endovo_last_error(void);
/* Overrides the ENDOVO_LOG_LEVEL environment variable. */
ENDOVO_API void endovo_set_log_level(endovo_log_level level);

/* ---- Pipeline commands ------------------------------------------------- */

typedef struct endovo_track_summary {
  int frames;
  int frames_processed;
  int keyframes;
  int failure_frame; /* -1 when the whole sequence was tracked */
  double mean_tracking_ms;
} endovo_track_summary;

/* Tracks a sequence and writes trajectory.txt, keyframes.json,
 * diagnostics.json, timing.json and config.json into out_dir. config_path
 * may be NULL for defaults. Returns ENDOVO_ERR_TRACKING_FAILURE, with the
 * outputs written and summary filled, when odometry loses track. */
ENDOVO_API endovo_status endovo_track(const char* manifest_path, const char* config_path,
                                      const char* out_dir, endovo_track_summary* summary);

typedef struct endovo_fuse_summary {
  int dims[3];
  uint64_t voxel_count;
  int views_integrated;
  uint64_t vertex_count;
  uint64_t triangle_count;
  double integration_seconds;
  double extraction_seconds;
} endovo_fuse_summary;

ENDOVO_API endovo_status endovo_fuse(const char* manifest_path, const char* keyframes_path,
                                     const char* trajectory_path, const char* config_path,
                                     const char* out_mesh, endovo_fuse_summary* summary);

typedef struct endovo_depth_metrics {
  double abs_rel;
  double sq_rel;
  double rmse;
  double rmse_log;
  double delta1;
  double delta2;
  double delta3;
  int64_t n_pixels;
  int64_t n_log_excluded;
} endovo_depth_metrics;

/* scale_mode is "none", "median_ratio" or "ratio_median"; units is "m" or
 * "mm". Either may be NULL to use the value from config_path (or the
 * default when that is NULL too). aggregate may be NULL. */
ENDOVO_API endovo_status endovo_eval(const char* pred_dir, const char* gt_dir,
                                     const char* config_path, const char* scale_mode,
                                     const char* units, double depth_scale,
                                     const char* out_json, endovo_depth_metrics* aggregate);

/* frames_written may be NULL. */
ENDOVO_API endovo_status endovo_synth(const char* scene_path, const char* out_dir,
                                      uint64_t seed, int* frames_written);

/* ---- Geometry and metrics ---------------------------------------------- */

ENDOVO_API endovo_status endovo_se3_exp(const double twist[6], double matrix[16]);
/* near_singular (may be NULL) is set to 1 when the rotation angle is within
 * 1e-6 of pi. */
ENDOVO_API endovo_status endovo_se3_log(const double matrix[16], double twist[6],
                                        int* near_singular);

ENDOVO_API endovo_status endovo_depth_metrics_compute(const double* pred, const double* gt,
                                                      int width, int height,
                                                      const char* scale_mode,
                                                      endovo_depth_metrics* out);

/* ---- TSDF volume and meshes -------------------------------------------- */

typedef struct endovo_volume endovo_volume;
typedef struct endovo_mesh endovo_mesh;

/* intrinsics = {fx, fy, cx, cy}; the image size comes from width/height. */
ENDOVO_API endovo_status endovo_volume_create(const double origin[3], double voxel_size,
                                              const int dims[3], double trunc,
                                              endovo_volume** out);
ENDOVO_API void endovo_volume_destroy(endovo_volume* volume);
ENDOVO_API endovo_status endovo_volume_integrate(endovo_volume* volume, const double* depth,
                                                 int width, int height,
                                                 const double intrinsics[4],
                                                 const double pose_world[16]);
ENDOVO_API endovo_status endovo_volume_extract_mesh(const endovo_volume* volume,
                                                    endovo_mesh** out);

ENDOVO_API size_t endovo_mesh_vertex_count(const endovo_mesh* mesh);
ENDOVO_API size_t endovo_mesh_triangle_count(const endovo_mesh* mesh);
/* Copies 3 * vertex_count doubles. */
ENDOVO_API endovo_status endovo_mesh_vertices(const endovo_mesh* mesh, double* xyz);
/* Copies 3 * triangle_count indices. */
ENDOVO_API endovo_status endovo_mesh_triangles(const endovo_mesh* mesh, int32_t* indices);
ENDOVO_API endovo_status endovo_mesh_write_ply(const endovo_mesh* mesh, const char* path);
ENDOVO_API void endovo_mesh_destroy(endovo_mesh* mesh);

#ifdef __cplusplus
}
#endif

#endif /* ENDOVO_ENDOVO_H_ */
