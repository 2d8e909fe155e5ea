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
#include <random>
#include <vector>

#include "vpest/geometry.hpp"

namespace vpest {

using Rng = std::mt19937_64;

/// Independent stream for (seed, index); sharding a study by index never
/// changes what each instance sees.
Rng derived_rng(std::uint64_t seed, std::uint64_t index);

/// Haar-uniform rotation from a normalized 4-D Gaussian quaternion.
Mat3 random_rotation(Rng& rng);

/// Rotates g by an angle ~ N(0, sigma_deg) about an axis drawn uniformly on
/// the unit sphere. Always consumes the same number of draws.
Vec3 perturb_gravity(const Vec3& g, double sigma_deg, Rng& rng);

struct SyntheticConfig {
  double focal_min = 100.0;
  double focal_max = 2000.0;
  Vec3 anchor_mean = Vec3(0.0, 0.0, 5.0);
  double anchor_std = 1.0;
  double lambda_std = 1.0;
  std::array<int, 3> lines_per_direction{20, 20, 20};
  double sigma_image_px = 0.0;
  double sigma_gravity_deg = 0.0;
  double sigma_pp_px = 0.0;
  /// Fraction of all returned segments that are outliers.
  double outlier_fraction = 0.0;
  double outlier_half_window_px = 1000.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledSegment {
  LineSegment segment;
  /// Direction index 0..2, or -1 for an outlier.
  int label = -1;
};

/// Segments are in principal-point-centered pixel coordinates, so they map to
/// lines with line_from_segment(seg, {0, 0}).
struct SyntheticInstance {
  ManhattanFrame gt_frame;
  Vec3 gravity_gt = Vec3::UnitZ();
  Vec3 gravity_noisy = Vec3::UnitZ();
  Vec2 principal_offset = Vec2::Zero();
  std::vector<LabeledSegment> segments;

  std::vector<HomogeneousLine2> lines() const;
};

SyntheticInstance generate_instance(const SyntheticConfig& cfg, Rng& rng);

/// Instance `index` of the stream seeded by cfg.seed.
SyntheticInstance generate_instance(const SyntheticConfig& cfg, std::uint64_t index);

}  // namespace vpest
