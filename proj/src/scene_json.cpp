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

#include <cmath>
#include <numbers>

#include "endovo/error.hpp"
#include "endovo/pipeline.hpp"
#include "json_util.hpp"

// Scene file layout:
//
// {
//   "camera": {"fx": .., "fy": .., "cx": .., "cy": .., "width": .., "height": ..}
//             or {"width": .., "height": .., "hfov_deg": ..},
//   "depth_scale": 1e-4,
//   "fps": 30,
//   "primitives": [
//     {"type": "plane", "point": [x, y, z], "normal": [x, y, z], "texture": T},
//     {"type": "sphere", "center": [x, y, z], "radius": r, "texture": T}],
//   "trajectory": one of
//     {"type": "orbit", "center": [..], "axis": [..], "radius": r,
//      "start_deg": 0, "step_deg": 2, "frames": 50, "outward": true}
//     {"type": "line", "start": P, "velocity": [dx, dy, dz], "frames": N}
//     {"type": "constant_motion", "start": P,
//      "step": {"rotation_deg": [rx, ry, rz], "translation": [x, y, z]}, "frames": N}
//     {"type": "poses", "poses": [P, ...]},
//   "noise": {"depth_sigma": 0, "depth_sigma_relative": 0,
//             "intensity_sigma": 0, "replace_depth_min": 0,
//             "replace_depth_max": 0, "start_frame": 0}
// }
//
// T = {"base": 0.5, "waves": [{"amplitude": a, "direction": [..],
//                             "frequency": f, "phase": p}, ...]}
// P = {"position": [..], "quaternion": [qx, qy, qz, qw]}
//     or {"eye": [..], "target": [..], "up": [..]}

namespace endovo {

using detail::Json;
using detail::ObjectReader;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

PinholeCamera read_camera(const Json& j) {
  ObjectReader r(j, "camera");
  PinholeCamera cam;
  cam.width = r.value<int>("width");
  cam.height = r.value<int>("height");
  if (r.has("hfov_deg")) {
    const double hfov = r.value<double>("hfov_deg");
    if (!(hfov > 0.0 && hfov < 180.0)) r.fail("hfov_deg", "must lie in (0, 180)");
    cam.fx = cam.fy = 0.5 * cam.width / std::tan(0.5 * hfov * kDegToRad);
    cam.cx = 0.5 * (cam.width - 1);
    cam.cy = 0.5 * (cam.height - 1);
  } else {
    cam.fx = r.value<double>("fx");
    cam.fy = r.value<double>("fy");
    cam.cx = r.value<double>("cx");
    cam.cy = r.value<double>("cy");
  }
  r.finish();
  try {
    cam.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("camera: ") + e.what());
  }
  return cam;
}

Texture read_texture(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  Texture t;
  r.optional("base", t.base);
  if (const Json* waves = r.find("waves")) {
    if (!waves->is_array()) r.fail("waves", "expected an array");
    for (std::size_t i = 0; i < waves->size(); ++i) {
      ObjectReader wr((*waves)[i], r.child("waves[" + std::to_string(i) + "]"));
      Texture::Wave w;
      w.amplitude = wr.value<double>("amplitude");
      w.direction = wr.vec3("direction");
      w.frequency = wr.value<double>("frequency");
      wr.optional("phase", w.phase);
      wr.finish();
      t.waves.push_back(w);
    }
  }
  r.finish();
  return t;
}

Primitive read_primitive(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string type = r.value<std::string>("type");
  Texture texture;
  if (const Json* t = r.find("texture")) texture = read_texture(*t, r.child("texture"));
  Primitive p;
  if (type == "plane") {
    const Vec3 point = r.vec3("point");
    const Vec3 normal = r.vec3("normal");
    r.finish();
    p = Primitive::plane(point, normal, std::move(texture));
  } else if (type == "sphere") {
    const Vec3 center = r.vec3("center");
    const double radius = r.value<double>("radius");
    r.finish();
    p = Primitive::sphere(center, radius, std::move(texture));
  } else {
    r.fail("type", "unknown primitive type '" + type + "'");
  }
  return p;
}

Pose read_pose(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  Pose pose;
  if (r.has("eye")) {
    const Vec3 eye = r.vec3("eye");
    const Vec3 target = r.vec3("target");
    Vec3 up = -Vec3::UnitY();
    r.optional_vec3("up", up);
    pose = look_at(eye, target, up);
  } else {
    const Vec3 t = r.vec3("position");
    const Json& q = r.require("quaternion");
    if (!q.is_array() || q.size() != 4) r.fail("quaternion", "expected [qx, qy, qz, qw]");
    pose = Pose::from_quaternion(t, q[0].get<double>(), q[1].get<double>(),
                                 q[2].get<double>(), q[3].get<double>());
  }
  r.finish();
  return pose;
}

int read_frames(ObjectReader& r) {
  const int frames = r.value<int>("frames");
  if (frames < 1) r.fail("frames", "must be >= 1");
  return frames;
}

std::vector<Pose> read_trajectory(const Json& j) {
  ObjectReader r(j, "trajectory");
  const std::string type = r.value<std::string>("type");
  std::vector<Pose> poses;
  if (type == "orbit") {
    const Vec3 center = r.vec3("center");
    const Vec3 axis = r.vec3("axis");
    const double radius = r.value<double>("radius");
    double start = 0.0;
    r.optional("start_deg", start);
    const double step = r.value<double>("step_deg");
    bool outward = true;
    r.optional("outward", outward);
    poses = orbit_trajectory(center, axis, radius, start * kDegToRad, step * kDegToRad,
                             read_frames(r), outward);
  } else if (type == "line") {
    const Pose start = read_pose(r.require("start"), r.child("start"));
    const Vec3 velocity = r.vec3("velocity");
    const int frames = read_frames(r);
    for (int i = 0; i < frames; ++i) {
      poses.emplace_back(start.rotation(), start.translation() + double(i) * velocity);
    }
  } else if (type == "constant_motion") {
    const Pose start = read_pose(r.require("start"), r.child("start"));
    ObjectReader sr(r.require("step"), r.child("step"));
    Vec3 rot = Vec3::Zero();
    Vec3 trans = Vec3::Zero();
    sr.optional_vec3("rotation_deg", rot);
    sr.optional_vec3("translation", trans);
    sr.finish();
    poses = constant_motion_trajectory(start, Pose(exp_so3(rot * kDegToRad), trans),
                                       read_frames(r));
  } else if (type == "poses") {
    const Json& list = r.require("poses");
    if (!list.is_array() || list.empty()) r.fail("poses", "expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      poses.push_back(read_pose(list[i], r.child("poses[" + std::to_string(i) + "]")));
    }
  } else {
    r.fail("type", "unknown trajectory type '" + type + "'");
  }
  r.finish();
  return poses;
}

}  // namespace

SceneDescription parse_scene(const std::string& json_text) {
  const Json j = detail::parse_json(json_text, "scene");
  ObjectReader r(j, "");
  SceneDescription d;
  try {
    d.camera = read_camera(r.require("camera"));
    r.optional("depth_scale", d.depth_scale);
    r.optional("fps", d.fps);
    const Json& prims = r.require("primitives");
    if (!prims.is_array()) r.fail("primitives", "expected an array");
    for (std::size_t i = 0; i < prims.size(); ++i) {
      d.scene.primitives.push_back(
          read_primitive(prims[i], "primitives[" + std::to_string(i) + "]"));
    }
    d.scene.validate();
    d.trajectory = read_trajectory(r.require("trajectory"));
    if (const Json* n = r.find("noise")) {
      ObjectReader nr(*n, "noise");
      nr.optional("depth_sigma", d.noise.depth_sigma);
      nr.optional("depth_sigma_relative", d.noise.depth_sigma_relative);
      nr.optional("intensity_sigma", d.noise.intensity_sigma);
      nr.optional("replace_depth_min", d.noise.replace_depth_min);
      nr.optional("replace_depth_max", d.noise.replace_depth_max);
      nr.optional("start_frame", d.noise.start_frame);
      nr.finish();
      if (d.noise.depth_sigma < 0.0 || d.noise.depth_sigma_relative < 0.0 ||
          d.noise.intensity_sigma < 0.0) {
        throw Error(ErrorCode::kConfig, "noise: sigmas must be >= 0");
      }
      if (d.noise.replaces_depth() && !(d.noise.replace_depth_min > 0.0 &&
                                        d.noise.replace_depth_min < d.noise.replace_depth_max)) {
        throw Error(ErrorCode::kConfig, "noise: replacement depth range must satisfy 0 < min < max");
      }
    }
    r.finish();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) {
      throw Error(ErrorCode::kConfig, std::string("scene: ") + e.what());
    }
    throw;
  }
  if (!(d.depth_scale > 0.0)) throw Error(ErrorCode::kConfig, "scene: depth_scale must be > 0");
  if (!(d.fps > 0.0)) throw Error(ErrorCode::kConfig, "scene: fps must be > 0");
  return d;
}

}  // namespace endovo
