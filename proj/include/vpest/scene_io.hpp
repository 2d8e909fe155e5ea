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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vpest/geometry.hpp"
#include "vpest/minimal_solvers.hpp"
#include "vpest/robust.hpp"
#include "vpest/synthetic.hpp"

namespace vpest {

// A scene as read from disk. Segment endpoints are in pixel coordinates with
// the origin at the top-left corner; the principal point is the image center.
struct SceneInput {
  double width = 0.0;
  double height = 0.0;
  std::vector<LineSegment> segments;
  GravityObservation gravity;
  std::optional<ManhattanFrame> gt;
};

// JSON scene:
//   {"width": W, "height": H, "segments": [[x1,y1,x2,y2(,w)], ...],
//    "gravity": [gx,gy,gz], "gravity_quality": "exact"|"prior",
//    "gt": {"rotation": [9 values, row-major], "focal": f}}
// gravity, gravity_quality and gt are optional. Throws ParseError.
SceneInput parse_scene_json(std::string_view text);

// One `x1,y1,x2,y2` segment per line. Blank lines and lines starting with '#'
// are skipped. Throws ParseError.
SceneInput parse_scene_csv(std::string_view text, double width, double height);

// Picks the format from the first non-blank character ('{' means JSON).
// CSV input needs width and height. Throws IoError or ParseError.
SceneInput load_scene(const std::string& path, std::optional<double> width = std::nullopt,
                      std::optional<double> height = std::nullopt);

std::string scene_to_json(const SceneInput& scene);

// Shifts centered synthetic coordinates into a width x height image and
// embeds the ground truth. `quality` Absent drops the gravity entry.
SceneInput scene_from_instance(const SyntheticInstance& inst, double width, double height,
                               GravityQuality quality, bool noisy_gravity = true);

struct EstimateOptions {
  /// Unset runs the hybrid estimator.
  std::optional<SolverId> solver;
  RansacConfig ransac;
  bool evaluate = false;
};

struct SceneEstimate {
  RobustEstimate robust;
  /// Inliers per VP as indices into SceneInput::segments.
  std::array<std::vector<std::size_t>, 3> segment_indices;
  std::optional<EvalMetrics> metrics;
  double elapsed_ms = 0.0;
};

// Degenerate segments are skipped. Throws InsufficientLines, ConfigMismatch,
// NoModelFound, InvalidArgument.
SceneEstimate estimate_scene(const SceneInput& scene, const EstimateOptions& options);

std::string estimate_to_json(const SceneEstimate& estimate, bool include_timings);

}  // namespace vpest
