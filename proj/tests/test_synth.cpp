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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "endovo/error.hpp"
#include "endovo/eval.hpp"
#include "endovo/imgproc.hpp"
#include "endovo/synth.hpp"
#include "support/scenes.hpp"

using namespace endovo;
using namespace endovo::testing;

namespace {

SyntheticScene plane_at(double z) {
  SyntheticScene s;
  s.primitives.push_back(Primitive::plane(Vec3(0, 0, z), Vec3(0, 0, -1), wave_texture()));
  return s;
}

bool all_equal(const DepthImage& d, double value, double tol) {
  return std::all_of(d.data().begin(), d.data().end(),
                     [&](double x) { return std::abs(x - value) <= tol; });
}

}  // namespace

TEST_CASE("render of a fronto-parallel plane") {
  const PinholeCamera cam = make_camera(40, 30, 60.0);
  const RenderedView at_one = render(plane_at(1.0), cam, Pose::identity());
  CHECK(all_equal(at_one.depth, 1.0, 1e-12));

  const Pose forward(Mat3::Identity(), Vec3(0, 0, 0.1));
  CHECK(all_equal(render(plane_at(1.0), cam, forward).depth, 0.9, 1e-12));
}

TEST_CASE("render of a sphere") {
  PinholeCamera cam = make_camera(41, 41, 40.0);
  SyntheticScene s;
  s.primitives.push_back(Primitive::sphere(Vec3(0, 0, 2), 0.5, wave_texture()));
  const RenderedView view = render(s, cam, Pose::identity());
  CHECK(view.depth(20, 20) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(view.depth(0, 0) == kInvalidDepth);
  CHECK(view.intensity(0, 0) == 0.0);
  CHECK(view.intensity(20, 20) == doctest::Approx(wave_texture().evaluate(Vec3(0, 0, 1.5))));
}

TEST_CASE("render returns the nearest hit") {
  SyntheticScene s = plane_at(3.0);
  s.primitives.push_back(Primitive::plane(Vec3(0, 0, 2), Vec3(0, 0, -1), wave_texture(1)));
  CHECK(all_equal(render(s, make_camera(8, 6, 50.0), Pose::identity()).depth, 2.0, 1e-12));
}

TEST_CASE("primitive intersection") {
  const Primitive sphere = Primitive::sphere(Vec3::Zero(), 1.0, wave_texture());
  CHECK(*sphere.intersect(Vec3::Zero(), Vec3::UnitX()) == doctest::Approx(1.0));
  CHECK(*sphere.intersect(Vec3(-3, 0, 0), Vec3::UnitX()) == doctest::Approx(2.0));
  CHECK_FALSE(sphere.intersect(Vec3(3, 0, 0), Vec3::UnitX()).has_value());
  const Primitive plane = Primitive::plane(Vec3(0, 0, 1), Vec3::UnitZ(), wave_texture());
  CHECK_FALSE(plane.intersect(Vec3::Zero(), Vec3::UnitX()).has_value());
}

TEST_CASE("rendered depth back-projects onto the pixel grid") {
  OrbitScene orbit(3);
  const Pose pose = orbit.poses(5)[4];
  const RenderedView view = render(orbit.scene, orbit.camera, pose);
  const PinholeCamera& cam = orbit.camera;
  double worst = 0.0;
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const double d = view.depth(u, v);
      REQUIRE(d > 0.0);
      const Vec3 x = backproject(cam, Vec2(u, v), d);
      worst = std::max(worst, (project(cam, x).pixel - Vec2(u, v)).norm());
      // The point lies on the cavity wall.
      CHECK(std::abs((pose * x).norm() - 1.0) < 1e-9);
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("image gradient converges to the texture gradient") {
  std::vector<double> errors;
  for (int scale : {1, 2, 4}) {
    const PinholeCamera cam = make_camera(40 * scale, 30 * scale, 60.0);
    const GrayImage img = render(plane_at(1.0), cam, Pose::identity()).intensity;
    const ImageGradient g = gradient(img);
    double worst = 0.0;
    for (int v = 1; v < cam.height - 1; ++v) {
      for (int u = 1; u < cam.width - 1; ++u) {
        const Vec3 x = backproject(cam, Vec2(u, v), 1.0);
        const Vec3 dt = wave_texture().gradient(x);  // texture of plane_at
        worst = std::max(worst, std::abs(g.gx(u, v) * cam.fx - dt.x()));
        worst = std::max(worst, std::abs(g.gy(u, v) * cam.fy - dt.y()));
      }
    }
    errors.push_back(worst);
  }
  CHECK(errors[1] < 0.3 * errors[0]);
  CHECK(errors[2] < 0.3 * errors[1]);
}

TEST_CASE("generate_sequence without noise reproduces render") {
  OrbitScene orbit;
  const SyntheticSequence seq = orbit.sequence(1);
  REQUIRE(seq.frames.size() == 1);
  const RenderedView view = render(orbit.scene, orbit.camera, orbit.poses(1)[0]);
  CHECK(seq.frames[0].intensity == view.intensity);
  CHECK(seq.frames[0].depth == view.depth);
  CHECK(seq.frames[0].timestamp == 0.0);
  CHECK(seq.ground_truth[0].matrix() == orbit.poses(1)[0].matrix());
}

TEST_CASE("generate_sequence is deterministic per seed") {
  OrbitScene orbit;
  NoiseConfig noise;
  noise.depth_sigma_relative = 0.01;
  noise.intensity_sigma = 0.02;
  const SyntheticSequence a = orbit.sequence(3, noise, 9);
  const SyntheticSequence b = orbit.sequence(3, noise, 9);
  const SyntheticSequence c = orbit.sequence(3, noise, 10);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.frames[i].depth == b.frames[i].depth);
    CHECK(a.frames[i].intensity == b.frames[i].intensity);
  }
  CHECK_FALSE(a.frames[0].depth == c.frames[0].depth);
  CHECK(a.frames[2].timestamp == doctest::Approx(2.0 / kDefaultFps));
}

TEST_CASE("noise stays in range") {
  OrbitScene orbit;
  NoiseConfig noise;
  noise.depth_sigma = 0.5;
  noise.intensity_sigma = 0.5;
  const SyntheticSequence seq = orbit.sequence(2, noise, 1);
  for (const auto& f : seq.frames) {
    for (double d : f.depth.data()) CHECK(d > 0.0);
    for (double i : f.intensity.data()) {
      CHECK(i >= 0.0);
      CHECK(i <= 1.0);
    }
  }
}

TEST_CASE("noise starts at start_frame") {
  OrbitScene orbit;
  const SyntheticSequence clean = orbit.sequence(4);
  NoiseConfig noise;
  noise.start_frame = 2;
  noise.replace_depth_min = 0.3;
  noise.replace_depth_max = 1.2;
  const SyntheticSequence seq = orbit.sequence(4, noise, 4);
  CHECK(seq.frames[0].depth == clean.frames[0].depth);
  CHECK(seq.frames[1].depth == clean.frames[1].depth);
  CHECK(seq.frames[2].intensity == clean.frames[2].intensity);
  for (int i : {2, 3}) {
    double lo = 1e9, hi = 0.0;
    for (double d : seq.frames[i].depth.data()) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    CHECK(lo >= 0.3);
    CHECK(hi <= 1.2);
    CHECK(hi - lo > 0.8);
  }
}

TEST_CASE("generate_sequence argument checks") {
  OrbitScene orbit;
  CHECK_THROWS_AS(generate_sequence(orbit.scene, orbit.camera, {}, {}, 0), Error);
  NoiseConfig bad;
  bad.replace_depth_min = 2.0;
  bad.replace_depth_max = 1.0;
  CHECK_THROWS_AS(orbit.sequence(1, bad), Error);
  Texture wild;
  wild.waves.push_back({0.9, Vec3::UnitX(), 1.0, 0.0});
  CHECK_THROWS_AS(wild.validate(), Error);
}

TEST_CASE("ground-truth relative motion composes exactly") {
  const Pose step = exp_se3(Twist{Vec3(0.01, -0.02, 0.005), Vec3(0.002, 0.0, 0.01)});
  const std::vector<Pose> traj = constant_motion_trajectory(Pose::identity(), step, 6);
  REQUIRE(traj.size() == 6);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    CHECK((traj[i - 1].inverse() * traj[i]).matrix().isApprox(step.matrix(), 1e-12));
  }
  OrbitScene orbit;
  const std::vector<Pose> poses = orbit.poses(10);
  const Pose d0 = poses[0].inverse() * poses[1];
  for (std::size_t i = 2; i < poses.size(); ++i) {
    CHECK((poses[i - 1].inverse() * poses[i]).matrix().isApprox(d0.matrix(), 1e-12));
  }
}

TEST_CASE("look_at") {
  const Pose p = look_at(Vec3(1, 2, 3), Vec3(1, 2, 5), Vec3(0, -1, 0));
  CHECK((p.translation() - Vec3(1, 2, 3)).norm() < 1e-15);
  CHECK((p.rotation().col(2) - Vec3::UnitZ()).norm() < 1e-12);
  CHECK(p.orthonormality_error() < 1e-12);
}

TEST_CASE("depth noise increases tracking error") {
  constexpr int kFrames = 15;
  TrackerConfig cfg;
  NoiseConfig noise;
  noise.depth_sigma_relative = 0.01;
  std::vector<double> clean_err, noisy_err;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    OrbitScene orbit(seed);
    const SyntheticSequence clean = orbit.sequence(kFrames);
    const SyntheticSequence noisy = orbit.sequence(kFrames, noise, seed);
    const OdometryResult rc = run_odometry(clean.frames, orbit.camera, cfg);
    const OdometryResult rn = run_odometry(noisy.frames, orbit.camera, cfg);
    REQUIRE_FALSE(rc.failure_frame.has_value());
    REQUIRE_FALSE(rn.failure_frame.has_value());
    clean_err.push_back(trajectory_ate(anchor_to(rc.trajectory, clean.ground_truth[0]),
                                       clean.ground_truth));
    noisy_err.push_back(trajectory_ate(anchor_to(rn.trajectory, noisy.ground_truth[0]),
                                       noisy.ground_truth));
  }
  MESSAGE("median ATE clean " << median(clean_err) << " noisy " << median(noisy_err));
  CHECK(median(noisy_err) > median(clean_err));
}
