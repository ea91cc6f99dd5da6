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

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace endovo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Pinhole intrinsics. Pixel (u, v): u is the column, v the row, and integer
// coordinates address pixel centers with (0, 0) at the top-left.
struct PinholeCamera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  // Throws Error(kInvalidArgument) when the invariants do not hold.
  void validate() const;

  // Intrinsics for pyramid level `level`: focal lengths, principal point and
  // image size are halved once per level (sizes with integer floor).
  PinholeCamera scaled(int level) const;

  bool contains(const Vec2& pixel) const {
    return pixel.x() >= 0.0 && pixel.y() >= 0.0 &&
           pixel.x() <= width - 1 && pixel.y() <= height - 1;
  }

  bool operator==(const PinholeCamera&) const = default;
};

enum class Visibility { kInView, kOutOfView, kBehindCamera };

struct Projection {
  Visibility visibility = Visibility::kBehindCamera;
  Vec2 pixel = Vec2::Zero();

  bool in_view() const { return visibility == Visibility::kInView; }
};

// Pixel coordinates are always filled for points in front of the camera, even
// when they land outside the image.
Projection project(const PinholeCamera& cam, const Vec3& point);

// Throws Error(kInvalidDepth) for depth <= 0.
Vec3 backproject(const PinholeCamera& cam, const Vec2& pixel, double depth);

Mat3 hat(const Vec3& v);

// se(3) element. omega is the axis-angle rotation part, nu the translational
// part. Stacked as (omega, nu) wherever a 6-vector is needed.
struct Twist {
  Vec3 omega = Vec3::Zero();
  Vec3 nu = Vec3::Zero();

  static Twist from_vector(const Vec6& v);
  Vec6 vector() const;
};

// Rigid transform x -> R x + t.
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return Pose(); }
  static Pose from_matrix(const Mat4& m);
  // Quaternion order (qx, qy, qz, qw) as used by TUM trajectory files.
  static Pose from_quaternion(const Vec3& translation, double qx, double qy,
                              double qz, double qw);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Mat4 matrix() const;
  // Unit quaternion with qw >= 0.
  Eigen::Quaterniond quaternion() const;

  Pose inverse() const;
  // Composition (this after rhs). Re-orthonormalizes the product once its
  // drift from SO(3) exceeds 1e-10, so long chains stay valid.
  Pose operator*(const Pose& rhs) const;
  Vec3 operator*(const Vec3& p) const { return rotation_ * p + translation_; }

  // Max-abs deviation of R^T R from identity.
  double orthonormality_error() const;
  // Projects the rotation back onto SO(3) (SVD).
  Pose orthonormalized() const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

Pose exp_se3(const Twist& psi);
Mat3 exp_so3(const Vec3& omega);

struct TwistLog {
  Twist twist;
  // Set when the rotation angle is within 1e-6 of pi.
  bool near_singular = false;
};

TwistLog log_se3_checked(const Pose& pose);
inline Twist log_se3(const Pose& pose) { return log_se3_checked(pose).twist; }
Vec3 log_so3(const Mat3& rotation);

// Rotation angle in radians, in [0, pi].
double rotation_angle(const Mat3& rotation);

}  // namespace endovo
