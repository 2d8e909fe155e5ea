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

#include "vpest/studies.hpp"

#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace vpest {
namespace {

int data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

TEST(StabilityStudy, OneRunPerSolver) {
  const StabilityStudy s = run_stability_study(1, 3);
  EXPECT_EQ(s.rows.size(), 5u);
  const std::string csv = stability_csv(s);
  EXPECT_EQ(csv.rfind("#schema=vp-bench-v1 study=stability", 0), 0u);
  EXPECT_EQ(data_rows(csv), 5);
}

TEST(StabilityStudy, DeterministicAcrossThreads) {
  const std::string a = stability_csv(run_stability_study(500, 7, 1));
  const std::string b = stability_csv(run_stability_study(500, 7, 1));
  const std::string c = stability_csv(run_stability_study(500, 7, 8));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(StabilityStudy, AllSolversStable) {
  const StabilityStudy s = run_stability_study(2000, 11, 4);
  for (const StabilitySummary& row : s.summary) {
    EXPECT_GE(row.success_fraction, 0.999) << solver_name(row.solver);
    EXPECT_EQ(row.runs, 2000);
  }
}

TEST(NoiseStudy, GridShapeAndNoiselessCell) {
  const auto grid = default_noise_grid();
  EXPECT_EQ(grid.size(), 20u);
  EXPECT_EQ(principal_point_grid().size(), 5u);
  const std::vector<NoiseCell> cells{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  const auto rows = run_noise_study(cells, 200, 3, 2);
  EXPECT_EQ(rows.size(), 10u);
  for (const NoiseRow& r : rows) {
    if (r.cell.sigma_image_px == 0.0) {
      EXPECT_LT(r.mean_rotation_error_deg, 1e-6) << solver_name(r.solver);
      EXPECT_LT(r.mean_focal_rel_error, 1e-6) << solver_name(r.solver);
    } else {
      EXPECT_GT(r.mean_rotation_error_deg, 0.0);
    }
  }
  EXPECT_EQ(data_rows(noise_csv(rows)), 10);
  EXPECT_EQ(noise_csv(rows), noise_csv(run_noise_study(cells, 200, 3, 5)));
}

TEST(RuntimeStudy, IterationFactors) {
  const std::vector<double> ratios{0.5};
  const auto rows = run_runtime_study(ratios, 1, 2000);
  ASSERT_EQ(rows.size(), 5u);
  for (const RuntimeRow& r : rows) {
    EXPECT_EQ(r.iterations, needs_gravity(r.solver) ? 17 : 72);
    EXPECT_GT(r.mean_call_us, 0.0);
    EXPECT_DOUBLE_EQ(r.theoretical_us, r.mean_call_us * r.iterations);
  }
  const std::string csv = runtime_csv(rows);
  EXPECT_EQ(csv.rfind("#schema=vp-bench-v1 study=runtime", 0), 0u);
  EXPECT_EQ(data_rows(csv), 5);
}

}  // namespace
}  // namespace vpest
