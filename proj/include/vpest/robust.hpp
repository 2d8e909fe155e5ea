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
#include <cstdint>
#include <span>
#include <vector>

#include "vpest/geometry.hpp"
#include "vpest/minimal_solvers.hpp"
#include "vpest/nonminimal.hpp"
#include "vpest/synthetic.hpp"

namespace vpest {

enum class LoMode { Ours, Iter, None };

using SolverWeights = std::array<double, 5>;  // indexed by solver_index()

struct RansacConfig {
  int min_iterations = 1000;
  /// Hard cap, also returned by iterations_needed when nothing is known.
  int max_iterations = 10000;
  double confidence = 0.99;
  /// Inlier bound on line_vp_deviation, in pixels.
  double inlier_threshold_px = 1.5;
  int lo_iterations = 100;
  double lo_subset_fraction = 0.5;
  int lo_min_subset = 6;
  int refine_iterations = 50;
  SolverWeights solver_priors{0.2, 0.2, 0.2, 0.2, 0.2};
  std::uint64_t seed = 0;
  double prior_gravity_jitter_deg = 0.1;
  LoMode lo_mode = LoMode::Ours;
  FocalBracket focal_bracket{};
  int max_sample_retries = 100;

  void validate() const;
};

struct ScoredFrame {
  int score = 0;
  InlierPartition partition;
  /// Input indices of the lines in each partition set.
  std::array<std::vector<std::size_t>, 3> inlier_indices;
  /// Sum of squared line_vp_deviation over the inliers.
  double residual = 0.0;
};

struct RobustEstimate {
  ManhattanFrame frame;
  InlierPartition partition;
  std::array<std::vector<std::size_t>, 3> inlier_indices;
  int score = 0;
  int iterations_run = 0;
  std::array<int, 5> solver_draws{};
  int lo_improvements = 0;
};

/// Assigns each line to the frame VP with the smallest line_vp_deviation, if
/// that deviation is below the threshold.
ScoredFrame score_frame(const ManhattanFrame& frame, std::span<const HomogeneousLine2> lines,
                        double threshold_px);

/// ceil(log(1 - confidence) / log(1 - ratio^m)), at least 1; `cap` when the
/// ratio is zero.
int iterations_needed(double inlier_ratio, int sample_size, double confidence,
                      int cap = 10000);

/// prior * eps^m per solver, normalized. Throws AllZeroWeights.
SolverWeights solver_probabilities(const SolverWeights& priors, double inlier_ratio);

struct LoResult {
  ManhattanFrame frame;
  ScoredFrame scored;
  int improvements = 0;
};

/// A refit replaces the incumbent when it scores higher, or scores the same
/// with a lower inlier residual. With Exact gravity, refits keep the first
/// axis on the gravity direction.
LoResult local_optimize(const ManhattanFrame& best, std::span<const HomogeneousLine2> lines,
                        const RansacConfig& config, Rng& rng, LoMode mode,
                        const GravityObservation& gravity = {});

RobustEstimate ransac(std::span<const HomogeneousLine2> lines, SolverId solver,
                      const GravityObservation& gravity, const RansacConfig& config);

RobustEstimate hybrid_ransac(std::span<const HomogeneousLine2> lines,
                             const GravityObservation& gravity, const RansacConfig& config);

}  // namespace vpest
