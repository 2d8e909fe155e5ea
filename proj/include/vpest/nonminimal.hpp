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

#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vpest/geometry.hpp"

namespace vpest {

/// Lines assigned to each of the three VPs of a frame (set i <-> column i).
struct InlierPartition {
  std::array<std::vector<HomogeneousLine2>, 3> sets;

  std::size_t count(int i) const { return sets[static_cast<std::size_t>(i)].size(); }
  std::size_t total() const { return sets[0].size() + sets[1].size() + sets[2].size(); }
};

/// Unit VP minimizing the weighted sum of squared line distances (right null
/// vector of the stacked, weighted, normalized lines).
Vec3 refit_vp_lsq(std::span<const HomogeneousLine2> lines);

/// Least-squares focal from the three pairwise orthogonality constraints,
/// each linear in f^2. VPs are normalized first, so the result does not
/// depend on their individual scales.
double focal_from_vps(const Vec3& v1, const Vec3& v2, const Vec3& v3);

struct NonMinimalDiagnostics {
  int calls = 0;
  int fallbacks = 0;
};

/// Refit VPs -> focal -> calibrate -> nearest rotation. Any failure returns
/// `fallback` unchanged. Each set needs at least two lines.
ManhattanFrame nonminimal_solve(const InlierPartition& part, const ManhattanFrame& fallback,
                                NonMinimalDiagnostics* diagnostics = nullptr);

/// Iterative variant linearizing K R around the current estimate and
/// re-orthogonalizing after each step. Returns the lowest-cost iterate.
ManhattanFrame nonminimal_linearized(const InlierPartition& part, const ManhattanFrame& init,
                                     int iters);

/// Rotates `frame` minimally so that column 0 equals +-`vertical` (sign of
/// the current column kept); the focal is unchanged.
ManhattanFrame snap_vertical(const ManhattanFrame& frame, const Vec3& vertical);

/// Sum of squared refine_residuals.
double partition_cost(const ManhattanFrame& frame, const InlierPartition& part);

// Local chart used by refine_ls: rotation R * exp([w]x), focal f * exp(s),
// parameter vector (w0, w1, w2, s).
using ChartStep = Eigen::Vector4d;

ManhattanFrame apply_chart_step(const ManhattanFrame& frame, const ChartStep& step);

/// Signed line_vp_deviation of every line against its VP, in set order.
Eigen::VectorXd refine_residuals(const ManhattanFrame& frame, const InlierPartition& part);

/// Analytic Jacobian of refine_residuals w.r.t. the chart at step = 0.
Eigen::MatrixX4d refine_jacobian(const ManhattanFrame& frame, const InlierPartition& part);

struct RefineOptions {
  int max_iters = 50;
  double initial_damping = 1e-3;
  double relative_tolerance = 1e-10;
  /// Only rotate about the first axis, keeping column 0 of R fixed. Used
  /// when the vertical direction is known exactly.
  bool lock_vertical = false;
};

/// Levenberg-Marquardt on the 4-parameter chart. The returned cost never
/// exceeds the initial one.
ManhattanFrame refine_ls(const ManhattanFrame& frame, const InlierPartition& part,
                         const RefineOptions& options = {});

inline ManhattanFrame refine_ls(const ManhattanFrame& frame, const InlierPartition& part,
                                int max_iters) {
  RefineOptions options;
  options.max_iters = max_iters;
  return refine_ls(frame, part, options);
}

}  // namespace vpest
