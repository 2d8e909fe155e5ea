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
#include <limits>
#include <optional>
#include <string_view>

#include <boost/container/static_vector.hpp>

#include "vpest/geometry.hpp"

namespace vpest {

// Configuration x1-x2-x3: number of sample lines on each of the three VPs.
// The "g" solvers additionally take the vertical direction (VP 1).
enum class SolverId { S220, S211, S200g, S011g, S110g };

inline constexpr std::array<SolverId, 5> kAllSolvers = {
    SolverId::S220, SolverId::S211, SolverId::S200g, SolverId::S011g, SolverId::S110g};

constexpr int solver_index(SolverId id) { return static_cast<int>(id); }
constexpr bool needs_gravity(SolverId id) {
  return id == SolverId::S200g || id == SolverId::S011g || id == SolverId::S110g;
}
constexpr int sample_size(SolverId id) { return needs_gravity(id) ? 2 : 4; }

std::string_view solver_name(SolverId id);
std::optional<SolverId> parse_solver_name(std::string_view name);

/// VP index (0-based) of each sample slot, in slot order.
boost::container::static_vector<int, 4> slot_assignment(SolverId id);

/// Lines per VP for the configuration, e.g. {2, 1, 1} for S211.
std::array<int, 3> configuration(SolverId id);

enum class SolveStatus {
  Ok,
  ParallelLines,
  GravitySingularity,
  DenominatorSingularity,
  NoPositiveFocal,
  NoRealRoot,
  NoCommonRoot,
  NegativeFocalSquared,
  VPsAtInfinity,
  NoRootInBracket,
  Degenerate,
  ConfigMismatch,
};

std::string_view to_string(SolveStatus status);

using FrameSet = boost::container::static_vector<ManhattanFrame, 4>;

struct SolveResult {
  SolveStatus status = SolveStatus::Ok;
  FrameSet frames;

  bool ok() const noexcept { return status == SolveStatus::Ok && !frames.empty(); }
};

struct OrthoBasis {
  Vec3 b1;
  Vec3 b2;
};

/// Admissible focal range for solvers that can return several roots.
struct FocalBracket {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double f) const noexcept { return f >= lo && f <= hi; }
};

// Two lines through VP 2, gravity known.
SolveResult solve_200g(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                       const Direction3& g);

// One vertical line, one line through VP 2, gravity known.
SolveResult solve_011g(const HomogeneousLine2& l_vertical,
                       const HomogeneousLine2& l_horizontal, const Direction3& g);

OrthoBasis build_ortho_basis(const Direction3& g);

// One line through VP 2 and one through VP 3, gravity known. Eliminates the
// rotation angle first and solves a quadratic in f.
SolveResult solve_110g(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                       const Direction3& g);

// Same problem, focal eliminated first: quartic in the half-angle tangent.
SolveResult solve_110g_quartic(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                               const Direction3& g);

// Two lines through VP 1 and two through VP 2, no gravity.
SolveResult solve_220(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                      const HomogeneousLine2& l3, const HomogeneousLine2& l4);

// Two lines through VP 1, one through VP 2, one through VP 3, no gravity.
SolveResult solve_211(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                      const HomogeneousLine2& l3, const HomogeneousLine2& l4,
                      const FocalBracket& bracket = {});

struct MinimalSample {
  boost::container::static_vector<HomogeneousLine2, 4> lines;
  boost::container::static_vector<int, 4> assignment;
};

/// Uniform dispatch. Throws Error(ConfigMismatch) if the sample shape or the
/// gravity availability does not match the solver.
SolveResult run_solver(SolverId id, const MinimalSample& sample,
                       const GravityObservation& gravity, const FocalBracket& bracket = {});

}  // namespace vpest
