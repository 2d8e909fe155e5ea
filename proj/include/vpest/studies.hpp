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
#include <string>
#include <vector>

#include "vpest/minimal_solvers.hpp"
#include "vpest/robust.hpp"
#include "vpest/synthetic.hpp"

namespace vpest {

// Every study derives instance randomness from (seed, solver, instance
// index), so results do not depend on the thread count.

struct StabilityRow {
  SolverId solver = SolverId::S220;
  int run = 0;
  bool solved = false;
  double rotation_error_deg = 180.0;
  double focal_abs_error = 0.0;
  double focal_rel_error = 0.0;
  double gt_focal = 0.0;
};

struct StabilitySummary {
  SolverId solver = SolverId::S220;
  int runs = 0;
  int successes = 0;
  double success_fraction = 0.0;
  double rotation_tolerance_deg = 0.0;
  double focal_rel_tolerance = 0.0;
};

struct StabilityStudy {
  std::vector<StabilityRow> rows;
  std::array<StabilitySummary, 5> summary;
};

/// Success thresholds: S211 is checked with looser bounds.
double stability_rotation_tolerance_deg(SolverId id);
double stability_focal_tolerance(SolverId id);

StabilityStudy run_stability_study(int n, std::uint64_t seed, int threads = 1);

struct NoiseCell {
  double sigma_image_px = 0.0;
  double sigma_gravity_deg = 0.0;
  double sigma_pp_px = 0.0;
};

struct NoiseRow {
  SolverId solver = SolverId::S220;
  NoiseCell cell;
  int runs = 0;
  int solved = 0;
  double mean_rotation_error_deg = 0.0;
  double mean_focal_abs_error = 0.0;
  double mean_focal_rel_error = 0.0;
};

/// sigma_i in {0, 0.5, 1, 2} px crossed with sigma_g in {0, 0.1, 1, 5, 10} deg.
std::vector<NoiseCell> default_noise_grid();
/// sigma_p in {0, 1, 2, 5, 10} px at sigma_i = 1 px, sigma_g = 0.
std::vector<NoiseCell> principal_point_grid();

/// Means over instances where the solver returned a frame; the best of the
/// returned frames (aligned rotation error) is scored.
std::vector<NoiseRow> run_noise_study(std::span<const NoiseCell> grid, int n, std::uint64_t seed,
                                      int threads = 1);

struct RuntimeRow {
  SolverId solver = SolverId::S220;
  double outlier_ratio = 0.0;
  long calls = 0;
  double mean_call_us = 0.0;
  int iterations = 0;
  double theoretical_us = 0.0;
};

std::vector<RuntimeRow> run_runtime_study(std::span<const double> outlier_ratios,
                                          std::uint64_t seed, long calls = 100000);

std::string stability_csv(const StabilityStudy& study);
std::string noise_csv(std::span<const NoiseRow> rows);
std::string runtime_csv(std::span<const RuntimeRow> rows);

}  // namespace vpest
