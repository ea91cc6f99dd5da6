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

#include <Eigen/Eigenvalues>
#include <cmath>

#include "endovo/error.hpp"
#include "endovo/fusion.hpp"
#include "support/scenes.hpp"

using namespace endovo;
using namespace endovo::testing;

namespace {

const PinholeCamera kCam = make_camera(64, 48, 60.0);

// Column of voxels on the optical axis, z = 0.9 + 0.025 k.
TsdfVolume axis_column() {
  return TsdfVolume(Vec3(-0.025, -0.025, 0.9), 0.025, {3, 3, 8}, 0.05);
}

// RMS distance of points to their least-squares plane.
double plane_fit_rms(const std::vector<Vec3>& pts) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : pts) mean += p;
  mean /= double(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  return std::sqrt(eig.eigenvalues()[0] / double(pts.size()));
}

}  // namespace

TEST_CASE("integrate stores projective distances") {
  TsdfVolume vol = axis_column();
  const DepthImage plane(64, 48, 1.0);
  vol.integrate(plane, nullptr, kCam, Pose::identity());
  CHECK(vol.tsdf(1, 1, 3) == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(vol.weight(1, 1, 3) == 1.0);
  CHECK(std::abs(vol.tsdf(1, 1, 4)) < 1e-12);
  CHECK(vol.tsdf(1, 1, 0) == doctest::Approx(0.05));  // truncated in front
  CHECK(vol.weight(1, 1, 7) == 0.0);                  // beyond -trunc
  CHECK(vol.tsdf(1, 1, 5) == doctest::Approx(-0.025));
}

TEST_CASE("integrating the same depth twice keeps distances") {
  TsdfVolume once = axis_column();
  TsdfVolume twice = axis_column();
  const DepthImage plane(64, 48, 1.0);
  once.integrate(plane, nullptr, kCam, Pose::identity());
  twice.integrate(plane, nullptr, kCam, Pose::identity());
  twice.integrate(plane, nullptr, kCam, Pose::identity());
  for (std::size_t i = 0; i < once.voxel_count(); ++i) {
    CHECK(twice.tsdf_data()[i] == doctest::Approx(once.tsdf_data()[i]).epsilon(1e-15));
    CHECK(twice.weight_data()[i] == 2.0 * once.weight_data()[i]);
  }
}

TEST_CASE("integrate validates sizes") {
  TsdfVolume vol = axis_column();
  CHECK_THROWS_AS(vol.integrate(DepthImage(10, 10, 1.0), nullptr, kCam, Pose::identity()), Error);
  CHECK_THROWS_AS(TsdfVolume(Vec3::Zero(), 0.0, {2, 2, 2}, 0.1), Error);
}

TEST_CASE("extract_mesh of an empty field") {
  TsdfVolume vol(Vec3::Zero(), 0.1, {4, 4, 4}, 0.3);
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 4; ++i) vol.set(i, j, k, 0.2, 1.0);
    }
  }
  CHECK(extract_mesh(vol).empty());
  CHECK(extract_mesh(TsdfVolume(Vec3::Zero(), 0.1, {4, 4, 4}, 0.3)).empty());
}

TEST_CASE("extract_mesh of a single negative corner") {
  const double vs = 0.1;
  TsdfVolume vol(Vec3::Zero(), vs, {2, 2, 2}, 1.0);
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) vol.set(i, j, k, 0.5 * vs, 1.0);
    }
  }
  vol.set(0, 0, 0, -0.5 * vs, 1.0);
  const TriangleMesh mesh = extract_mesh(vol);
  REQUIRE(mesh.triangles.size() == 1);
  REQUIRE(mesh.vertices.size() == 3);
  std::vector<Vec3> expected = {Vec3(0.05, 0, 0), Vec3(0, 0.05, 0), Vec3(0, 0, 0.05)};
  for (const Vec3& e : expected) {
    bool found = false;
    for (const Vec3& v : mesh.vertices) found = found || (v - e).norm() < 1e-12;
    CHECK(found);
  }
  // The face normal points from the negative corner to the positive side.
  const auto& t = mesh.triangles[0];
  const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                     .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
  CHECK(n.dot(Vec3(1, 1, 1)) > 0.0);
}

TEST_CASE("extract_mesh of an analytic sphere") {
  const double vs = 0.02;
  const int n = 64;
  const Vec3 origin = Vec3::Constant(-0.5 * vs * (n - 1));
  TsdfVolume vol(origin, vs, {n, n, n}, 4 * vs);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        vol.set(i, j, k, vol.voxel_position(i, j, k).norm() - 0.5, 1.0);
      }
    }
  }
  const TriangleMesh mesh = extract_mesh(vol);
  REQUIRE_FALSE(mesh.empty());
  double worst = 0.0;
  for (const Vec3& v : mesh.vertices) worst = std::max(worst, std::abs(v.norm() - 0.5));
  CHECK(worst < std::sqrt(3.0) * vs);
  CHECK(worst < 0.002);
  for (const auto& t : mesh.triangles) {
    for (int idx : t) {
      CHECK(idx >= 0);
      CHECK(idx < int(mesh.vertices.size()));
    }
  }
}

TEST_CASE("fusing one view of a plane gives a flat mesh") {
  SyntheticScene scene;
  scene.primitives.push_back(Primitive::plane(Vec3(0, 0, 1), Vec3(0.2, 0.1, -1), wave_texture()));
  const RenderedView view = render(scene, kCam, Pose::identity());
  FusionConfig cfg;
  cfg.voxel_size = 0.01;
  const FusionView fv{&view.depth, nullptr, kCam, Pose::identity()};
  FusionStats stats;
  const TriangleMesh mesh = fuse_views({&fv, 1}, cfg, &stats);
  REQUIRE(mesh.vertices.size() > 100);
  CHECK(plane_fit_rms(mesh.vertices) < 0.5 * cfg.voxel_size);
  CHECK(stats.views_integrated == 1);
  CHECK(stats.voxel_count == std::size_t(stats.dims[0]) * stats.dims[1] * stats.dims[2]);
}

TEST_CASE("repeating a view leaves the mesh unchanged") {
  SyntheticScene scene;
  scene.primitives.push_back(Primitive::sphere(Vec3(0, 0, 1.2), 0.4, wave_texture()));
  const RenderedView view = render(scene, kCam, Pose::identity());
  FusionConfig cfg;
  cfg.voxel_size = 0.02;
  const FusionView fv{&view.depth, nullptr, kCam, Pose::identity()};
  const std::vector<FusionView> five(5, fv);
  const TsdfVolume a = integrate_views({&fv, 1}, cfg);
  const TsdfVolume b = integrate_views(five, cfg);
  for (std::size_t i = 0; i < a.voxel_count(); ++i) {
    CHECK(std::abs(a.tsdf_data()[i] - b.tsdf_data()[i]) < 1e-12);
    CHECK(b.weight_data()[i] == 5.0 * a.weight_data()[i]);
  }
  const TriangleMesh ma = extract_mesh(a);
  const TriangleMesh mb = extract_mesh(b);
  REQUIRE(ma.vertices.size() == mb.vertices.size());
  CHECK(ma.triangles == mb.triangles);
  for (std::size_t i = 0; i < ma.vertices.size(); ++i) {
    CHECK((ma.vertices[i] - mb.vertices[i]).norm() < 1e-9);
  }
}

TEST_CASE("fusion carries vertex colors") {
  SyntheticScene scene;
  scene.primitives.push_back(Primitive::plane(Vec3(0, 0, 1), Vec3(0, 0, -1), wave_texture()));
  const RenderedView view = render(scene, kCam, Pose::identity());
  RgbImage red(64, 48);
  for (int v = 0; v < 48; ++v) {
    for (int u = 0; u < 64; ++u) red.pixel(u, v)[0] = 1.0;
  }
  FusionConfig cfg;
  cfg.voxel_size = 0.02;
  const FusionView fv{&view.depth, &red, kCam, Pose::identity()};
  const TriangleMesh mesh = fuse_views({&fv, 1}, cfg);
  REQUIRE(mesh.colors.size() == mesh.vertices.size());
  for (const Vec3& c : mesh.colors) CHECK((c - Vec3(1, 0, 0)).norm() < 1e-12);

  cfg.use_color = false;
  CHECK(fuse_views({&fv, 1}, cfg).colors.empty());
}

TEST_CASE("fusion errors") {
  FusionConfig cfg;
  CHECK_THROWS_AS(fuse_views({}, cfg), Error);

  const DepthImage depth(64, 48, 1.0);
  const FusionView fv{&depth, nullptr, kCam, Pose::identity()};
  cfg.voxel_size = 0.001;
  cfg.memory_cap_bytes = std::size_t(1) << 20;
  try {
    fuse_views({&fv, 1}, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMemoryCap);
    CHECK(std::string(e.what()).find("voxel grid needs") != std::string::npos);
  }

  FusionConfig bad;
  bad.voxel_size = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = FusionConfig{};
  bad.bounds = VolumeBounds{Vec3::Ones(), Vec3::Zero()};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("explicit bounds fix the grid") {
  const DepthImage depth(64, 48, 1.0);
  const FusionView fv{&depth, nullptr, kCam, Pose::identity()};
  FusionConfig cfg;
  cfg.voxel_size = 0.05;
  cfg.bounds = VolumeBounds{Vec3(-1, -1, 0), Vec3(1, 1, 2)};
  FusionStats stats;
  const TsdfVolume vol = integrate_views({&fv, 1}, cfg, &stats);
  CHECK(vol.dims() == std::array<int, 3>{41, 41, 41});
  CHECK(vol.origin() == Vec3(-1, -1, 0));
  CHECK(stats.dims == vol.dims());
}
