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

#include <cmath>
#include <random>

#include "endovo/error.hpp"
#include "endovo/eval.hpp"
#include "endovo/tracking.hpp"
#include "support/oracles.hpp"

using namespace endovo;
using endovo::testing::naive_depth_metrics;

namespace {

DepthImage row(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return DepthImage(n, 1, std::move(values));
}

void check_close(const DepthMetrics& a, const DepthMetrics& b, double tol) {
  CHECK(std::abs(a.abs_rel - b.abs_rel) <= tol);
  CHECK(std::abs(a.sq_rel - b.sq_rel) <= tol * std::max(1.0, b.sq_rel));
  CHECK(std::abs(a.rmse - b.rmse) <= tol * std::max(1.0, b.rmse));
  CHECK(std::abs(a.rmse_log - b.rmse_log) <= tol);
  CHECK(std::abs(a.delta1 - b.delta1) < 1e-12);
  CHECK(std::abs(a.delta2 - b.delta2) < 1e-12);
  CHECK(std::abs(a.delta3 - b.delta3) < 1e-12);
  CHECK(a.n_pixels == b.n_pixels);
}

}  // namespace

TEST_CASE("median") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 2.0}) == 3.0);
  CHECK(median({1.0, 9.0, 2.0, 4.0}) == 3.0);
  CHECK_THROWS_AS(median({}), Error);
}

TEST_CASE("scale mode names") {
  for (ScaleMode m : {ScaleMode::kNone, ScaleMode::kMedianRatio, ScaleMode::kRatioMedian}) {
    CHECK(parse_scale_mode(to_string(m)) == m);
  }
  CHECK_FALSE(parse_scale_mode("median").has_value());
}

TEST_CASE("align_scale examples") {
  const DepthImage gt = row({2, 4});
  CHECK(align_scale(gt, gt, ScaleMode::kMedianRatio).scale == 1.0);
  CHECK(align_scale(gt, gt, ScaleMode::kRatioMedian).scale == 1.0);

  const ScaledDepth a = align_scale(row({1, 2}), gt, ScaleMode::kMedianRatio);
  CHECK(a.scale == 2.0);
  CHECK(a.depth == gt);

  const ScaledDepth b = align_scale(row({1, 1}), gt, ScaleMode::kRatioMedian);
  CHECK(b.scale == 3.0);
  CHECK(b.depth == row({3, 3}));

  const ScaledDepth none = align_scale(row({1, 1}), gt, ScaleMode::kNone);
  CHECK(none.scale == 1.0);
  CHECK(none.depth == row({1, 1}));
}

TEST_CASE("align_scale keeps invalid pixels invalid") {
  const ScaledDepth s = align_scale(row({1, kInvalidDepth, 2}), row({2, 5, kInvalidDepth}),
                                    ScaleMode::kMedianRatio);
  CHECK(s.scale == 2.0);
  CHECK(s.depth(1, 0) == kInvalidDepth);
  CHECK(s.depth(2, 0) == 4.0);
}

TEST_CASE("align_scale errors") {
  CHECK_THROWS_AS(align_scale(row({1, 2}), row({1, 2, 3}), ScaleMode::kNone), Error);
  CHECK_THROWS_AS(align_scale(row({kInvalidDepth, 1}), row({1, kInvalidDepth}),
                              ScaleMode::kMedianRatio),
                  Error);
}

TEST_CASE("depth_metrics of identical maps") {
  const DepthImage gt = row({1.5, 2.0, 7.0});
  for (ScaleMode m : {ScaleMode::kNone, ScaleMode::kMedianRatio, ScaleMode::kRatioMedian}) {
    const DepthMetrics d = depth_metrics(gt, gt, m);
    CHECK(d.abs_rel == 0.0);
    CHECK(d.sq_rel == 0.0);
    CHECK(d.rmse == 0.0);
    CHECK(d.rmse_log == 0.0);
    CHECK(d.delta1 == 1.0);
    CHECK(d.delta2 == 1.0);
    CHECK(d.delta3 == 1.0);
    CHECK(d.n_pixels == 3);
  }
}

TEST_CASE("depth_metrics hand example") {
  const DepthMetrics d = depth_metrics(row({1, 8}), row({2, 4}), ScaleMode::kMedianRatio);
  CHECK(d.abs_rel == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.delta1 == 0.0);
  CHECK(d.delta2 == 0.5);
  CHECK(d.delta3 == 0.5);
  check_close(d, naive_depth_metrics(row({1, 8}), row({2, 4}), ScaleMode::kMedianRatio), 1e-12);
}

TEST_CASE("doubling the prediction") {
  const DepthImage gt = row({1.0, 2.5, 3.0, 10.0});
  DepthImage twice = gt;
  for (double& x : twice.data()) x *= 2.0;
  const DepthMetrics scaled = depth_metrics(twice, gt, ScaleMode::kMedianRatio);
  CHECK(scaled.abs_rel == 0.0);
  CHECK(scaled.delta1 == 1.0);
  const DepthMetrics raw = depth_metrics(twice, gt, ScaleMode::kNone);
  CHECK(raw.abs_rel == 1.0);
  CHECK(raw.delta1 == 0.0);
  CHECK(raw.delta3 == 0.0);  // ratio 2 exceeds 1.25^3
}

TEST_CASE("depth_metrics agrees with the direct formulas") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> depth(0.05, 5.0), unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    DepthImage pred(17, 9), gt(17, 9);
    for (int v = 0; v < 9; ++v) {
      for (int u = 0; u < 17; ++u) {
        gt(u, v) = unit(rng) < 0.2 ? kInvalidDepth : depth(rng);
        pred(u, v) = unit(rng) < 0.2 ? kInvalidDepth : depth(rng);
      }
    }
    for (ScaleMode m : {ScaleMode::kNone, ScaleMode::kMedianRatio, ScaleMode::kRatioMedian}) {
      check_close(depth_metrics(pred, gt, m), naive_depth_metrics(pred, gt, m), 1e-12);
    }
  }
}

TEST_CASE("depth_metrics ordering invariants") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> depth(0.1, 3.0);
  DepthImage pred(20, 20), gt(20, 20);
  for (double& x : pred.data()) x = depth(rng);
  for (double& x : gt.data()) x = depth(rng);
  const DepthMetrics d = depth_metrics(pred, gt, ScaleMode::kRatioMedian);
  CHECK(d.delta1 <= d.delta2);
  CHECK(d.delta2 <= d.delta3);
  CHECK(d.delta3 <= 1.0);
  CHECK(d.abs_rel >= 0.0);
  CHECK(d.rmse_log >= 0.0);
}

TEST_CASE("constant offset moves rmse linearly") {
  const DepthImage gt(6, 4, 3.0);
  for (double offset : {0.1, 0.5, 1.0}) {
    const DepthImage pred(6, 4, 3.0 + offset);
    CHECK(depth_metrics(pred, gt, ScaleMode::kNone).rmse == doctest::Approx(offset));
  }
}

TEST_CASE("aggregate_metrics") {
  DepthMetrics a, b;
  a.abs_rel = 0.1;
  a.n_pixels = 10;
  b.abs_rel = 0.3;
  b.n_pixels = 30;
  const DepthMetrics both[] = {a, b};
  const DepthMetrics m = aggregate_metrics(both);
  CHECK(m.abs_rel == doctest::Approx(0.2));
  CHECK(m.n_pixels == 40);

  const DepthMetrics single[] = {a};
  CHECK(aggregate_metrics(single).abs_rel == a.abs_rel);
  const DepthMetrics same[] = {b, b};
  CHECK(aggregate_metrics(same).abs_rel == b.abs_rel);
  CHECK_THROWS_AS(aggregate_metrics({}), Error);
}

TEST_CASE("frames_until_failure") {
  CHECK(frames_until_failure(std::nullopt, 100) == 100);
  CHECK(frames_until_failure(42, 100) == 42);

  OdometryResult r;
  r.trajectory.resize(45);
  r.diagnostics.resize(45);
  r.failure_frame = 42;
  CHECK(frames_until_failure(r) == 42);
  r.failure_frame.reset();
  CHECK(frames_until_failure(r) == 45);
}

TEST_CASE("absolute_trajectory_error") {
  std::vector<Vec3> ref;
  for (int i = 0; i < 20; ++i) ref.emplace_back(std::cos(0.3 * i), std::sin(0.3 * i), 0.05 * i);
  CHECK(absolute_trajectory_error(ref, ref) < 1e-12);

  const Pose g = exp_se3(Twist{Vec3(0.3, -0.2, 1.1), Vec3(4, -1, 2)});
  std::vector<Vec3> moved;
  for (const Vec3& p : ref) moved.push_back(g * p);
  CHECK(absolute_trajectory_error(moved, ref) < 1e-9);

  // A single displaced point: the optimum cannot do worse than leaving it.
  std::vector<Vec3> bumped = ref;
  bumped[7] += Vec3(0, 0, 0.2);
  const double ate = absolute_trajectory_error(bumped, ref);
  CHECK(ate > 0.0);
  CHECK(ate <= 0.2 / std::sqrt(20.0) + 1e-12);

  CHECK_THROWS_AS(absolute_trajectory_error(std::span(ref).first(2), std::span(ref).first(2)),
                  Error);
  CHECK_THROWS_AS(absolute_trajectory_error(ref, std::span(ref).first(5)), Error);
}

TEST_CASE("path_length") {
  const std::vector<Vec3> pts = {Vec3::Zero(), Vec3(3, 4, 0), Vec3(3, 4, 1)};
  CHECK(path_length(pts) == doctest::Approx(6.0));
  CHECK(path_length(std::span(pts).first(1)) == 0.0);
}
