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

#include "endovo/tracking.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "endovo/error.hpp"

namespace endovo {

namespace {

constexpr int kMaxBacktracks = 5;
constexpr double kMaxCondition = 1e12;

struct Evaluation {
  double cost = 0.0;
  int valid = 0;
  int unsaturated = 0;
  int in_view = 0;
  int total = 0;

  double mean() const {
    return valid ? cost / valid : std::numeric_limits<double>::infinity();
  }
};

// Visits every keyframe point at `level` warped by pose_ck, passing the point,
// its current-camera position and its projection.
template <typename Fn>
void for_each_warp(const Keyframe& kf, const Pose& pose_ck, int level, Fn&& fn) {
  const PinholeCamera& cam = kf.camera(level);
  const Mat3& r = pose_ck.rotation();
  const Vec3& t = pose_ck.translation();
  for (const KeyPoint& kp : kf.points(level)) {
    const Vec3 pc = r * kp.point + t;
    fn(kp, pc, project(cam, pc));
  }
}

Evaluation evaluate(const Keyframe& kf, const GrayImage& frame, const Pose& pose_ck,
                    int level, double gamma, GrayImage* residual_map) {
  Evaluation e;
  for_each_warp(kf, pose_ck, level, [&](const KeyPoint& kp, const Vec3&,
                                        const Projection& proj) {
    ++e.total;
    if (!proj.in_view()) return;
    ++e.in_view;
    const auto sample = sample_bilinear(frame, proj.pixel.x(), proj.pixel.y());
    if (!sample) return;
    const double r = kp.intensity - *sample;
    const double a = std::abs(r);
    ++e.valid;
    if (a < gamma) {
      ++e.unsaturated;
      e.cost += a;
    } else {
      e.cost += gamma;
    }
    if (residual_map) (*residual_map)(kp.u, kp.v) = r;
  });
  return e;
}

void check_level(const Keyframe& kf, const GrayImage& frame, int level) {
  if (level < 0 || level >= kf.pyramid().num_levels()) {
    throw Error(ErrorCode::kInvalidArgument, "pyramid level out of range");
  }
  const PinholeCamera& cam = kf.camera(level);
  if (frame.width() != cam.width || frame.height() != cam.height) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame size does not match keyframe level");
  }
}

// Derivative of the sampled current-frame intensity with respect to a left
// twist perturbation, for a point already in current-camera coordinates.
Vec6 jacobian_row(const PinholeCamera& cam, const Vec3& pc, double du, double dv) {
  const double inv_z = 1.0 / pc.z();
  const double gx = du * cam.fx * inv_z;
  const double gy = dv * cam.fy * inv_z;
  const double gz = -(gx * pc.x() + gy * pc.y()) * inv_z;
  const Vec3 g(gx, gy, gz);
  Vec6 row;
  row.head<3>() = pc.cross(g);
  row.tail<3>() = g;
  return row;
}

template <int N>
Eigen::Matrix<double, N, 1> solve_normal_equations(
    const Eigen::Matrix<double, N, N>& h, const Eigen::Matrix<double, N, 1>& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> eig(h);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    std::ostringstream os;
    os << "degenerate geometry: normal matrix eigenvalues [" << lo << ", " << hi
       << "]";
    throw Error(ErrorCode::kDegenerateGeometry, os.str());
  }
  return -h.ldlt().solve(b);
}

template <int N>
Vec6 gauss_newton_step(const Keyframe& kf, const GrayImage& frame,
                       const Pose& pose, int level, double gamma) {
  using MatN = Eigen::Matrix<double, N, N>;
  using VecN = Eigen::Matrix<double, N, 1>;
  MatN h = MatN::Zero();
  VecN b = VecN::Zero();
  const PinholeCamera& cam = kf.camera(level);
  for_each_warp(kf, pose, level, [&](const KeyPoint& kp, const Vec3& pc,
                                     const Projection& proj) {
    if (!proj.in_view()) return;
    const auto s = sample_bilinear_with_gradient(frame, proj.pixel.x(), proj.pixel.y());
    if (!s) return;
    const double r = kp.intensity - s->value;
    if (!(std::abs(r) < gamma)) return;
    const Vec6 row = -jacobian_row(cam, pc, s->du, s->dv);
    const VecN j = row.head<N>();
    h.noalias() += j * j.transpose();
    b.noalias() += j * r;
  });
  Vec6 delta = Vec6::Zero();
  delta.head<N>() = solve_normal_equations<N>(h, b);
  return delta;
}

}  // namespace

void TrackerConfig::validate() const {
  std::ostringstream os;
  if (pyramid_levels < 2) os << "pyramid_levels must be >= 2; ";
  if (!(gamma > 0.0)) os << "gamma must be > 0; ";
  if (max_iterations < 1) os << "max_iterations must be >= 1; ";
  if (!(convergence_eps > 0.0)) os << "convergence_eps must be > 0; ";
  if (!(keyframe_ratio > 0.0 && keyframe_ratio <= 1.0)) {
    os << "keyframe_ratio must lie in (0, 1]; ";
  }
  if (min_valid_pixels < 1) os << "min_valid_pixels must be >= 1; ";
  if (!(min_overlap >= 0.0 && min_overlap <= 1.0)) os << "min_overlap must lie in [0, 1]; ";
  if (!(min_inlier_ratio >= 0.0 && min_inlier_ratio <= 1.0)) {
    os << "min_inlier_ratio must lie in [0, 1]; ";
  }
  if (failure_patience < 1) os << "failure_patience must be >= 1; ";
  const std::string msg = os.str();
  if (!msg.empty()) {
    throw Error(ErrorCode::kConfig, "tracker config: " + msg.substr(0, msg.size() - 2));
  }
}

Keyframe::Keyframe(int id, ImagePyramid pyramid, const Pose& pose_world,
                   std::optional<RgbImage> color)
    : id_(id),
      pyramid_(std::move(pyramid)),
      pose_world_(pose_world),
      color_(std::move(color)) {
  if (pyramid_.num_levels() < 2 || !pyramid_.has_depth()) {
    throw Error(ErrorCode::kInvalidArgument,
                "keyframe needs a depth pyramid with at least two levels");
  }
  points_.resize(pyramid_.num_levels());
  for (int l = 0; l < pyramid_.num_levels(); ++l) {
    const PyramidLevel& lvl = pyramid_.level(l);
    const DepthImage& depth = *lvl.depth;
    auto& pts = points_[l];
    for (int v = 0; v < depth.height(); ++v) {
      for (int u = 0; u < depth.width(); ++u) {
        const double d = depth(u, v);
        if (!is_valid_depth(d)) continue;
        pts.push_back({u, v, lvl.intensity(u, v),
                       backproject(lvl.camera, Vec2(u, v), d)});
      }
    }
  }
  if (points_[0].empty()) {
    throw Error(ErrorCode::kInitialization, "keyframe depth has no valid pixel");
  }
}

CostResult photometric_cost(const Keyframe& kf, const GrayImage& frame,
                            const Pose& pose_ck, int level, double gamma) {
  check_level(kf, frame, level);
  const PinholeCamera& cam = kf.camera(level);
  CostResult out;
  out.residuals = GrayImage(cam.width, cam.height,
                            std::numeric_limits<double>::quiet_NaN());
  const Evaluation e = evaluate(kf, frame, pose_ck, level, gamma, &out.residuals);
  if (e.valid == 0) {
    throw Error(ErrorCode::kDegenerateFrame,
                "photometric cost: no keyframe pixel warps into the frame");
  }
  out.cost = e.cost;
  out.valid_count = e.valid;
  out.unsaturated_count = e.unsaturated;
  out.total_count = e.total;
  out.in_view_count = e.in_view;
  return out;
}

std::vector<ResidualJacobian> photometric_jacobian(const Keyframe& kf,
                                                   const GrayImage& frame,
                                                   const Pose& pose_ck, int level) {
  check_level(kf, frame, level);
  const PinholeCamera& cam = kf.camera(level);
  std::vector<ResidualJacobian> rows;
  for_each_warp(kf, pose_ck, level, [&](const KeyPoint& kp, const Vec3& pc,
                                        const Projection& proj) {
    if (!proj.in_view()) return;
    const auto s = sample_bilinear_with_gradient(frame, proj.pixel.x(), proj.pixel.y());
    if (!s) return;
    rows.push_back({kp.u, kp.v, kp.intensity - s->value,
                    -jacobian_row(cam, pc, s->du, s->dv), proj.pixel});
  });
  return rows;
}

LevelResult gauss_newton_level(const Keyframe& kf, const GrayImage& frame,
                               const Pose& init, int level, Dof dof,
                               const TrackerConfig& cfg) {
  check_level(kf, frame, level);
  LevelResult out{init, {}};
  LevelDiagnostics& diag = out.diagnostics;

  Evaluation current = evaluate(kf, frame, init, level, cfg.gamma, nullptr);
  if (current.valid == 0) {
    throw Error(ErrorCode::kDegenerateFrame,
                "gauss-newton: no keyframe pixel warps into the frame");
  }
  diag.initial_cost = current.mean();
  diag.cost_history.push_back(current.mean());

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const Vec6 delta =
        dof == Dof::kRotationOnly
            ? gauss_newton_step<3>(kf, frame, out.pose, level, cfg.gamma)
            : gauss_newton_step<6>(kf, frame, out.pose, level, cfg.gamma);
    if (delta.norm() < cfg.convergence_eps) {
      diag.converged = true;
      break;
    }
    ++diag.iterations;
    Vec6 step = delta;
    bool accepted = false;
    for (int bt = 0; bt <= kMaxBacktracks; ++bt) {
      const Pose candidate = exp_se3(Twist::from_vector(step)) * out.pose;
      const Evaluation e = evaluate(kf, frame, candidate, level, cfg.gamma, nullptr);
      if (e.valid > 0 && e.mean() <= current.mean()) {
        out.pose = candidate;
        current = e;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent direction left at this resolution: a numerical minimum.
      diag.converged = true;
      break;
    }
    diag.cost_history.push_back(current.mean());
  }
  diag.final_cost = current.mean();
  return out;
}

TrackResult track_frame(const Keyframe& kf, const ImagePyramid& frame,
                        const Pose& init, const TrackerConfig& cfg) {
  cfg.validate();
  const int levels = kf.pyramid().num_levels();
  if (frame.num_levels() != levels) {
    throw Error(ErrorCode::kInvalidArgument,
                "track_frame: keyframe and frame pyramids differ in depth");
  }
  TrackResult out;
  out.iterations_per_level.assign(levels, 0);
  Pose pose = init;
  bool all_converged = true;
  for (int level = levels - 1; level >= 0; --level) {
    const Dof dof = level == levels - 1 ? Dof::kRotationOnly : Dof::kFull;
    LevelResult r = gauss_newton_level(kf, frame.level(level).intensity, pose,
                                       level, dof, cfg);
    pose = r.pose;
    out.iterations_per_level[level] = r.diagnostics.iterations;
    all_converged = all_converged && r.diagnostics.converged;
  }
  out.pose_ck = pose;
  const Evaluation e =
      evaluate(kf, frame.level(0).intensity, pose, 0, cfg.gamma, nullptr);
  out.overlap_ratio = e.total ? double(e.in_view) / e.total : 0.0;
  out.valid_count = e.valid;
  out.inlier_ratio = e.valid ? double(e.unsaturated) / e.valid : 0.0;
  out.final_cost = e.valid ? e.mean() : 0.0;
  out.converged = all_converged && e.valid >= cfg.min_valid_pixels &&
                  out.overlap_ratio >= cfg.min_overlap &&
                  out.inlier_ratio >= cfg.min_inlier_ratio;
  return out;
}

}  // namespace endovo
