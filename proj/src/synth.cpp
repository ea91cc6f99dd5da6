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

#include "endovo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "endovo/error.hpp"

namespace endovo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 unit(const Vec3& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be non-zero");
  }
  return v / n;
}

}  // namespace

double Texture::evaluate(const Vec3& p) const {
  double value = base;
  for (const Wave& w : waves) {
    value += w.amplitude *
             std::sin(kTwoPi * w.frequency * w.direction.normalized().dot(p) + w.phase);
  }
  return std::clamp(value, 0.0, 1.0);
}

Vec3 Texture::gradient(const Vec3& p) const {
  Vec3 g = Vec3::Zero();
  for (const Wave& w : waves) {
    const Vec3 d = w.direction.normalized();
    g += w.amplitude * kTwoPi * w.frequency *
         std::cos(kTwoPi * w.frequency * d.dot(p) + w.phase) * d;
  }
  return g;
}

void Texture::validate() const {
  double reach = 0.0;
  for (const Wave& w : waves) {
    unit(w.direction, "texture wave direction");
    reach += std::abs(w.amplitude);
  }
  if (base - reach < 0.0 || base + reach > 1.0) {
    std::ostringstream os;
    os << "texture range [" << base - reach << ", " << base + reach
       << "] leaves [0, 1]";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

Primitive Primitive::plane(const Vec3& point, const Vec3& normal, Texture texture) {
  Primitive p;
  p.kind = Kind::kPlane;
  p.point = point;
  p.normal = unit(normal, "plane normal");
  p.texture = std::move(texture);
  return p;
}

Primitive Primitive::sphere(const Vec3& center, double radius, Texture texture) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sphere radius must be positive");
  }
  Primitive p;
  p.kind = Kind::kSphere;
  p.point = center;
  p.radius = radius;
  p.texture = std::move(texture);
  return p;
}

std::optional<double> Primitive::intersect(const Vec3& origin, const Vec3& dir) const {
  if (kind == Kind::kPlane) {
    const double denom = normal.dot(dir);
    if (std::abs(denom) < 1e-12) return std::nullopt;
    const double t = normal.dot(point - origin) / denom;
    return t > 0.0 ? std::optional<double>(t) : std::nullopt;
  }
  const Vec3 oc = origin - point;
  const double a = dir.squaredNorm();
  const double b = oc.dot(dir);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - a * c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = b >= 0.0 ? -(b + sq) : -(b - sq);
  double t0 = q / a;
  double t1 = q != 0.0 ? c / q : t0;
  if (t0 > t1) std::swap(t0, t1);
  if (t0 > 0.0) return t0;
  if (t1 > 0.0) return t1;
  return std::nullopt;
}

void SyntheticScene::validate() const {
  for (const Primitive& p : primitives) p.texture.validate();
}

RenderedView render(const SyntheticScene& scene, const PinholeCamera& cam,
                    const Pose& pose_world) {
  cam.validate();
  RenderedView out{GrayImage(cam.width, cam.height, 0.0),
                   DepthImage(cam.width, cam.height, kInvalidDepth)};
  const Mat3& r = pose_world.rotation();
  const Vec3& origin = pose_world.translation();
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      // Unit camera-z component, so the ray parameter is the camera depth.
      const Vec3 ray_cam((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0);
      const Vec3 dir = r * ray_cam;
      double best = std::numeric_limits<double>::infinity();
      const Primitive* hit = nullptr;
      for (const Primitive& p : scene.primitives) {
        const auto t = p.intersect(origin, dir);
        if (t && *t < best) {
          best = *t;
          hit = &p;
        }
      }
      if (!hit) continue;
      out.depth(u, v) = best;
      out.intensity(u, v) = hit->texture.evaluate(origin + best * dir);
    }
  }
  return out;
}

SyntheticSequence generate_sequence(const SyntheticScene& scene,
                                    const PinholeCamera& cam,
                                    const std::vector<Pose>& trajectory,
                                    const NoiseConfig& noise, std::uint64_t seed,
                                    double fps) {
  if (trajectory.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "generate_sequence: empty trajectory");
  }
  if (!(fps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "generate_sequence: fps must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (noise.replaces_depth() &&
      !(noise.replace_depth_min > 0.0 && noise.replace_depth_min < noise.replace_depth_max)) {
    throw Error(ErrorCode::kInvalidArgument,
                "generate_sequence: replacement depth range must satisfy 0 < min < max");
  }
  std::uniform_real_distribution<double> replacement(noise.replace_depth_min,
                                                     noise.replace_depth_max);
  SyntheticSequence seq;
  seq.ground_truth = trajectory;
  seq.frames.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    RenderedView view = render(scene, cam, trajectory[i]);
    if (noise.any() && static_cast<int>(i) >= noise.start_frame) {
      auto depth = view.depth.data();
      auto intensity = view.intensity.data();
      for (std::size_t k = 0; k < depth.size(); ++k) {
        if (!is_valid_depth(depth[k])) continue;
        if (noise.replaces_depth()) depth[k] = replacement(rng);
        const double sigma = noise.depth_sigma + noise.depth_sigma_relative * depth[k];
        if (sigma > 0.0) {
          // Keep the pixel valid: noise may not push depth to or below zero.
          depth[k] = std::max(depth[k] + sigma * gauss(rng), 1e-3 * depth[k]);
        }
        if (noise.intensity_sigma > 0.0) {
          intensity[k] =
              std::clamp(intensity[k] + noise.intensity_sigma * gauss(rng), 0.0, 1.0);
        }
      }
    }
    PseudoRgbdFrame frame;
    frame.timestamp = double(i) / fps;
    frame.intensity = std::move(view.intensity);
    frame.depth = std::move(view.depth);
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = unit(target - eye, "view direction");
  const Vec3 y = unit(-(up - up.dot(z) * z), "up vector (parallel to view)");
  const Vec3 x = y.cross(z);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose(r, eye);
}

std::vector<Pose> orbit_trajectory(const Vec3& center, const Vec3& axis,
                                   double radius, double start_rad, double step_rad,
                                   int frames, bool outward) {
  const Vec3 a = unit(axis, "orbit axis");
  Vec3 e1 = a.unitOrthogonal();
  const Vec3 e2 = a.cross(e1);
  std::vector<Pose> poses;
  poses.reserve(std::max(frames, 0));
  for (int i = 0; i < frames; ++i) {
    const double theta = start_rad + step_rad * i;
    const Vec3 radial = std::cos(theta) * e1 + std::sin(theta) * e2;
    const Vec3 eye = center + radius * radial;
    const Vec3 target = outward ? Vec3(eye + radial) : center;
    poses.push_back(look_at(eye, target, a));
  }
  return poses;
}

std::vector<Pose> constant_motion_trajectory(const Pose& start, const Pose& step,
                                             int frames) {
  std::vector<Pose> poses;
  poses.reserve(std::max(frames, 0));
  Pose current = start;
  for (int i = 0; i < frames; ++i) {
    poses.push_back(current);
    current = current * step;
  }
  return poses;
}

}  // namespace endovo
