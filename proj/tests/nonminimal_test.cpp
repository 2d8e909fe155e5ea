// Copyright 2026 The vpest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vpest/nonminimal.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vpest/minimal_solvers.hpp"

namespace vpest {
namespace {

using testing::rel_error;

InlierPartition partition_of(const SyntheticInstance& inst) {
  InlierPartition part;
  for (const LabeledSegment& s : inst.segments) {
    if (s.label >= 0) part.sets[static_cast<std::size_t>(s.label)].push_back(line_from_segment(s.segment, Vec2::Zero()));
  }
  return part;
}

ManhattanFrame perturbed(const ManhattanFrame& f, double deg, double focal_scale, Rng& rng) {
  std::normal_distribution<double> n;
  const Vec3 axis = Vec3(n(rng), n(rng), n(rng)).normalized();
  return {f.rotation * axis_angle(axis, deg2rad(deg)), f.focal * focal_scale};
}

TEST(RefitVp, TwoLinesGiveIntersection) {
  const HomogeneousLine2 a(Vec3(1, 2, -3)), b(Vec3(-2, 1, 4));
  const std::vector<HomogeneousLine2> lines{a, b};
  const Vec3 v = refit_vp_lsq(lines);
  EXPECT_LT(v.cross(a.coeffs().cross(b.coeffs()).normalized()).norm(), 1e-12);
}

TEST(RefitVp, ManyLinesThroughKnownVp) {
  const Vec3 vp = Vec3(300, -120, 1).normalized();
  std::vector<HomogeneousLine2> lines;
  for (int i = 0; i < 20; ++i) {
    const Vec3 p(-200.0 + 17.0 * i, 50.0 - 9.0 * i, 1.0);
    lines.emplace_back(vp.cross(p), 1.0 + i);
  }
  const Vec3 v = refit_vp_lsq(lines);
  EXPECT_LT(std::asin(std::min(1.0, v.cross(vp).norm())), 1e-10);
}

TEST(RefitVp, OneLineThrows) {
  const std::vector<HomogeneousLine2> one{HomogeneousLine2(Vec3(1, 0, 0))};
  try {
    refit_vp_lsq(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientLines);
  }
}

TEST(FocalFromVps, RecoversConstructedFocal) {
  Rng rng = derived_rng(21, 0);
  for (int i = 0; i < 50; ++i) {
    const ManhattanFrame f{random_rotation(rng), 600.0};
    const double est = focal_from_vps(3.0 * f.vanishing_point(0), -f.vanishing_point(1), f.vanishing_point(2));
    EXPECT_LT(rel_error(est, 600.0), 1e-8);
  }
}

TEST(FocalFromVps, RankDeficientForAxisAlignedRotation) {
  const ManhattanFrame f{axis_angle(Vec3::UnitZ(), deg2rad(45.0)), 600.0};
  try {
    focal_from_vps(f.vanishing_point(0), f.vanishing_point(1), f.vanishing_point(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(FocalFromVps, StableUnderSmallPerturbation) {
  Rng rng = derived_rng(22, 0);
  std::normal_distribution<double> n(0.0, 1e-4);
  std::vector<double> errors;
  for (int i = 0; i < 101; ++i) {
    const ManhattanFrame f{random_rotation(rng), 600.0};
    std::array<Vec3, 3> v;
    for (int k = 0; k < 3; ++k) {
      // Tilt each direction by ~1e-4 rad before projecting.
      const Vec3 d = f.rotation.col(k) + Vec3(n(rng), n(rng), n(rng));
      v[static_cast<std::size_t>(k)] = f.intrinsics() * d;
    }
    errors.push_back(rel_error(focal_from_vps(v[0], v[1], v[2]), 600.0));
  }
  std::nth_element(errors.begin(), errors.begin() + 50, errors.end());
  EXPECT_LT(errors[50], 0.01);
}

TEST(NonMinimalSolve, NoiselessRecoversGroundTruth) {
  for (int i = 0; i < 100; ++i) {
    const SyntheticInstance inst = testing::clean_instance({2 + i % 5, 2 + i % 3, 2 + i % 7}, 23, i);
    const ManhattanFrame fallback{Mat3::Identity(), 1.0};
    const ManhattanFrame est = nonminimal_solve(partition_of(inst), fallback);
    EXPECT_LT(aligned_rotation_error_deg(est.rotation, inst.gt_frame.rotation), 1e-6);
    EXPECT_LT(rel_error(est.focal, inst.gt_frame.focal), 1e-8);
  }
}

TEST(NonMinimalSolve, FallbackReturnedVerbatim) {
  const ManhattanFrame r45{axis_angle(Vec3::UnitZ(), deg2rad(45.0)), 600.0};
  InlierPartition part;
  for (int i = 0; i < 3; ++i) {
    const Vec3 v = r45.vanishing_point(i);
    part.sets[static_cast<std::size_t>(i)] = {HomogeneousLine2(v.cross(Vec3(10, 3, 1))),
                                              HomogeneousLine2(v.cross(Vec3(-4, 7, 1)))};
  }
  Rng rng = derived_rng(24, 0);
  const ManhattanFrame fallback{random_rotation(rng), 123.0};
  NonMinimalDiagnostics diag;
  const ManhattanFrame out = nonminimal_solve(part, fallback, &diag);
  EXPECT_EQ(out.rotation, fallback.rotation);
  EXPECT_EQ(out.focal, fallback.focal);
  EXPECT_EQ(diag.calls, 1);
  EXPECT_EQ(diag.fallbacks, 1);
}

TEST(NonMinimalSolve, BeatsMinimalSolverUnderNoise) {
  SyntheticConfig cfg;
  cfg.lines_per_direction = {20, 20, 20};
  cfg.sigma_image_px = 1.0;
  cfg.seed = 25;
  int better = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const SyntheticInstance inst = generate_instance(cfg, static_cast<std::uint64_t>(i));
    const InlierPartition part = partition_of(inst);
    const SolveResult minimal = solve_220(part.sets[0][0], part.sets[0][1], part.sets[1][0], part.sets[1][1]);
    if (!minimal.ok()) {
      ++better;  // nothing to beat
      continue;
    }
    const ManhattanFrame est = nonminimal_solve(part, minimal.frames[0]);
    const double e_min = aligned_rotation_error_deg(minimal.frames[0].rotation, inst.gt_frame.rotation);
    const double e_nms = aligned_rotation_error_deg(est.rotation, inst.gt_frame.rotation);
    if (e_nms < e_min) ++better;
  }
  EXPECT_GE(better, 900);
}

TEST(NonMinimalLinearized, FixedPointAndConvergence) {
  Rng rng = derived_rng(26, 0);
  for (int i = 0; i < 20; ++i) {
    const SyntheticInstance inst = testing::clean_instance({6, 6, 6}, 26, i);
    const InlierPartition part = partition_of(inst);
    const ManhattanFrame at_gt = nonminimal_linearized(part, inst.gt_frame, 5);
    EXPECT_LT((at_gt.rotation - inst.gt_frame.rotation).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(rel_error(at_gt.focal, inst.gt_frame.focal), 1e-9);

    const ManhattanFrame start = perturbed(inst.gt_frame, 2.0, 1.0, rng);
    const ManhattanFrame out = nonminimal_linearized(part, start, 10);
    EXPECT_LT(rotation_error_deg(out.rotation, inst.gt_frame.rotation), 1e-4);
  }
  EXPECT_THROW(nonminimal_linearized(InlierPartition{}, ManhattanFrame{}, 0), Error);
}

TEST(RefineLs, FixedPointAndConvergence) {
  Rng rng = derived_rng(27, 0);
  for (int i = 0; i < 50; ++i) {
    const SyntheticInstance inst = testing::clean_instance({5, 5, 5}, 27, i);
    const InlierPartition part = partition_of(inst);
    const ManhattanFrame same = refine_ls(inst.gt_frame, part, 50);
    EXPECT_LT((same.rotation - inst.gt_frame.rotation).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(rel_error(same.focal, inst.gt_frame.focal), 1e-9);

    const ManhattanFrame start = perturbed(inst.gt_frame, 1.0, 1.02, rng);
    const ManhattanFrame out = refine_ls(start, part, 50);
    EXPECT_TRUE(is_valid_frame(out));
    EXPECT_LT(rotation_error_deg(out.rotation, inst.gt_frame.rotation), 1e-5);
    EXPECT_LE(partition_cost(out, part), partition_cost(start, part));
  }
}

TEST(RefineLs, LockVerticalKeepsFirstAxis) {
  Rng rng = derived_rng(28, 0);
  const SyntheticInstance inst = testing::clean_instance({5, 5, 5}, 28, 0);
  const InlierPartition part = partition_of(inst);
  ManhattanFrame start = perturbed(inst.gt_frame, 3.0, 0.97, rng);
  start = snap_vertical(start, inst.gt_frame.rotation.col(0));
  EXPECT_LT((start.rotation.col(0) - inst.gt_frame.rotation.col(0)).norm(), 1e-12);
  RefineOptions opts;
  opts.lock_vertical = true;
  const ManhattanFrame out = refine_ls(start, part, opts);
  EXPECT_LT((out.rotation.col(0) - inst.gt_frame.rotation.col(0)).norm(), 1e-12);
  EXPECT_LT(rotation_error_deg(out.rotation, inst.gt_frame.rotation), 1e-5);
}

TEST(SnapVertical, MinimalRotation) {
  Rng rng = derived_rng(29, 0);
  const ManhattanFrame f{random_rotation(rng), 400.0};
  const Vec3 target = (f.rotation.col(0) + Vec3(0.01, -0.02, 0.005)).normalized();
  const ManhattanFrame s = snap_vertical(f, -target);
  EXPECT_TRUE(is_valid_frame(s));
  EXPECT_LT((s.rotation.col(0) - target).norm(), 1e-12);
  const double moved = std::acos(std::clamp(f.rotation.col(0).dot(target), -1.0, 1.0));
  EXPECT_NEAR(deg2rad(rotation_error_deg(s.rotation, f.rotation)), moved, 1e-9);
  EXPECT_EQ(s.focal, f.focal);
}

TEST(RefineJacobian, MatchesCentralDifferences) {
  Rng rng = derived_rng(30, 0);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 25; ++trial) {
    SyntheticConfig cfg;
    cfg.lines_per_direction = {4, 4, 4};
    cfg.sigma_image_px = 2.0;
    cfg.seed = 30;
    const SyntheticInstance inst = generate_instance(cfg, static_cast<std::uint64_t>(trial));
    const ManhattanFrame frame = perturbed(inst.gt_frame, 2.0, 1.1, rng);
    const InlierPartition part = partition_of(inst);
    const Eigen::MatrixX4d jac = refine_jacobian(frame, part);
    for (int k = 0; k < 4; ++k) {
      const double h = 1e-6;
      ChartStep step = ChartStep::Zero();
      step(k) = h;
      const Eigen::VectorXd plus = refine_residuals(apply_chart_step(frame, step), part);
      step(k) = -h;
      const Eigen::VectorXd minus = refine_residuals(apply_chart_step(frame, step), part);
      const Eigen::VectorXd numeric = (plus - minus) / (2.0 * h);
      EXPECT_LT((numeric - jac.col(k)).norm(), 1e-5 * std::max(1.0, jac.col(k).norm())) << k;
    }
  }
}

}  // namespace
}  // namespace vpest
