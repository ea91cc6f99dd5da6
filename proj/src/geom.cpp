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

#include "endovo/geom.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <sstream>

#include "endovo/error.hpp"

namespace endovo {

namespace {

constexpr double kSmallAngle = 1e-8;
constexpr double kDriftTolerance = 1e-10;

Vec3 vee(const Mat3& m) {
  return Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)) * 0.5;
}

// (theta - sin theta) / theta^3, stable for small theta.
double third_coefficient(double theta) {
  if (theta < 1e-2) {
    const double t2 = theta * theta;
    return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
  }
  return (theta - std::sin(theta)) / (theta * theta * theta);
}

}  // namespace

void PinholeCamera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || width <= 0 || height <= 0 ||
      !(cx >= 0.0) || !(cy >= 0.0) || !(cx < width) || !(cy < height)) {
    std::ostringstream os;
    os << "invalid camera: fx=" << fx << " fy=" << fy << " cx=" << cx
       << " cy=" << cy << " size=" << width << "x" << height;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

PinholeCamera PinholeCamera::scaled(int level) const {
  if (level < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative pyramid level");
  }
  PinholeCamera out = *this;
  const double s = std::ldexp(1.0, -level);
  out.fx *= s;
  out.fy *= s;
  out.cx *= s;
  out.cy *= s;
  out.width = width >> level;
  out.height = height >> level;
  return out;
}

Projection project(const PinholeCamera& cam, const Vec3& point) {
  Projection out;
  if (!(point.z() > 0.0)) {
    out.visibility = Visibility::kBehindCamera;
    return out;
  }
  out.pixel = Vec2(cam.fx * point.x() / point.z() + cam.cx,
                   cam.fy * point.y() / point.z() + cam.cy);
  out.visibility =
      cam.contains(out.pixel) ? Visibility::kInView : Visibility::kOutOfView;
  return out;
}

Vec3 backproject(const PinholeCamera& cam, const Vec2& pixel, double depth) {
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::kInvalidDepth,
                "backproject: depth must be positive");
  }
  return Vec3((pixel.x() - cam.cx) / cam.fx * depth,
              (pixel.y() - cam.cy) / cam.fy * depth, depth);
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

Twist Twist::from_vector(const Vec6& v) {
  return Twist{v.head<3>(), v.tail<3>()};
}

Vec6 Twist::vector() const {
  Vec6 v;
  v << omega, nu;
  return v;
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {}

Pose Pose::from_matrix(const Mat4& m) {
  return Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Pose Pose::from_quaternion(const Vec3& translation, double qx, double qy,
                           double qz, double qw) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  if (!(q.norm() > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "zero quaternion");
  }
  q.normalize();
  return Pose(q.toRotationMatrix(), translation);
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Eigen::Quaterniond Pose::quaternion() const {
  Eigen::Quaterniond q(rotation_);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

Pose Pose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return Pose(rt, -(rt * translation_));
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out(rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_);
  if (out.orthonormality_error() > kDriftTolerance) return out.orthonormalized();
  return out;
}

double Pose::orthonormality_error() const {
  return (rotation_.transpose() * rotation_ - Mat3::Identity())
      .cwiseAbs()
      .maxCoeff();
}

Pose Pose::orthonormalized() const {
  Eigen::JacobiSVD<Mat3> svd(rotation_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) = -u.col(2);
    r = u * svd.matrixV().transpose();
  }
  return Pose(r, translation_);
}

Mat3 exp_so3(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 w = hat(omega);
  double a;
  double b;
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    const double half = std::sin(0.5 * theta);
    a = std::sin(theta) / theta;
    b = 2.0 * half * half / (theta * theta);
  }
  return Mat3::Identity() + a * w + b * w * w;
}

Pose exp_se3(const Twist& psi) {
  const double theta = psi.omega.norm();
  const Mat3 w = hat(psi.omega);
  double b;
  if (theta < kSmallAngle) {
    b = 0.5 - theta * theta / 24.0;
  } else {
    const double half = std::sin(0.5 * theta);
    b = 2.0 * half * half / (theta * theta);
  }
  const double c = third_coefficient(theta);
  const Mat3 left_jacobian = Mat3::Identity() + b * w + c * w * w;
  return Pose(exp_so3(psi.omega), left_jacobian * psi.nu);
}

double rotation_angle(const Mat3& rotation) {
  const double s = vee(rotation).norm();
  const double c = 0.5 * (rotation.trace() - 1.0);
  return std::atan2(s, c);
}

Vec3 log_so3(const Mat3& rotation) {
  const Vec3 w = vee(rotation);  // sin(theta) * axis
  const double s = w.norm();
  const double c = 0.5 * (rotation.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (theta < kSmallAngle) {
    return w * (1.0 + theta * theta / 6.0);
  }
  if (c > -0.99) {
    return w * (theta / s);
  }
  // Near pi the antisymmetric part vanishes; recover the axis from the
  // symmetric part, which equals c I + (1 - c) a a^T.
  const Mat3 outer =
      (0.5 * (rotation + rotation.transpose()) - c * Mat3::Identity()) /
      (1.0 - c);
  int i = 0;
  outer.diagonal().maxCoeff(&i);
  Vec3 axis = outer.col(i) / std::sqrt(outer(i, i));
  axis.normalize();
  if (axis.dot(w) < 0.0) axis = -axis;
  return axis * theta;
}

TwistLog log_se3_checked(const Pose& pose) {
  TwistLog out;
  const Vec3 omega = log_so3(pose.rotation());
  const double theta = omega.norm();
  out.near_singular = theta > std::numbers::pi - 1e-6;

  // V^{-1} = I - w/2 + d w^2 with d = (1 - (theta/2) cot(theta/2)) / theta^2.
  double d;
  if (theta < 1e-4) {
    d = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    const double half = 0.5 * theta;
    d = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  }
  const Mat3 w = hat(omega);
  const Mat3 v_inv = Mat3::Identity() - 0.5 * w + d * w * w;
  out.twist.omega = omega;
  out.twist.nu = v_inv * pose.translation();
  return out;
}

}  // namespace endovo
