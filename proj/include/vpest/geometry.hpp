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
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "vpest/error.hpp"

namespace vpest {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// A 2D line a*x + b*y + c = 0 in principal-point-centered pixel coordinates,
/// stored with sqrt(a^2 + b^2) = 1.
///
/// Lines built from segments also remember the segment: the weight is its
/// length (scales the residual in least-squares refits) and the anchor its
/// midpoint. Bare lines have weight 1 and anchor at the point closest to the
/// origin.
class HomogeneousLine2 {
 public:
  /// Normalizes arbitrary homogeneous coefficients. Throws
  /// DegenerateSegment when (a, b) vanishes (the line at infinity or zero)
  /// and InvalidArgument for a non-positive weight. The anchor is projected
  /// onto the line.
  explicit HomogeneousLine2(const Vec3& coeffs, double weight = 1.0,
                            const std::optional<Vec2>& anchor = std::nullopt);

  const Vec3& coeffs() const noexcept { return coeffs_; }
  double operator()(int i) const { return coeffs_(i); }
  double weight() const noexcept { return weight_; }
  const Vec2& anchor() const noexcept { return anchor_; }

 private:
  Vec3 coeffs_;
  double weight_;
  Vec2 anchor_;
};

/// Segment endpoints in image coordinates (origin top-left).
struct LineSegment {
  Vec2 p = Vec2::Zero();
  Vec2 q = Vec2::Zero();
  std::optional<double> weight;
};

/// Unit 3-vector.
class Direction3 {
 public:
  explicit Direction3(const Vec3& v);

  const Vec3& vec() const noexcept { return v_; }
  double operator()(int i) const { return v_(i); }

 private:
  Vec3 v_;
};

/// Camera rotation (columns are the three calibrated Manhattan directions)
/// plus the focal length in pixels. Vanishing points are K * column_i.
struct ManhattanFrame {
  Mat3 rotation = Mat3::Identity();
  double focal = 1.0;

  Mat3 intrinsics() const;
  /// Unit-norm vanishing point of direction i (0-based).
  Vec3 vanishing_point(int i) const;
};

/// Checks the frame invariants: orthonormal rotation with det +1 and f > 0.
bool is_valid_frame(const ManhattanFrame& frame, double tol = 1e-9);

enum class GravityQuality { Exact, Prior, Absent };

struct GravityObservation {
  Vec3 direction = Vec3::Zero();
  GravityQuality quality = GravityQuality::Absent;

  static GravityObservation absent() { return {}; }
  static GravityObservation exact(const Vec3& g);
  static GravityObservation prior(const Vec3& g);
  bool present() const noexcept { return quality != GravityQuality::Absent; }
};

struct EvalMetrics {
  double rotation_error_deg = 0.0;
  double vp_error_deg = 0.0;
  double focal_abs_error = 0.0;
  double focal_rel_error = 0.0;
};

/// Line through the segment endpoints after shifting the origin to the image
/// center (pass {0, 0} for coordinates that are already centered). The line
/// weight is the segment's own weight if set, otherwise its length; the
/// anchor is the midpoint.
HomogeneousLine2 line_from_segment(const LineSegment& seg, const Vec2& image_size);

/// |l^T v| / sqrt(l0^2 + l1^2) with v scaled to unit norm.
double vp_line_distance(const HomogeneousLine2& l, const Vec3& v);

/// Sine of the angle between a calibrated direction and the interpretation
/// plane of an image line, i.e. |n^T d| with n = K^T l and d both unit.
/// Minimized by the refinement step.
double line_direction_residual(const HomogeneousLine2& l, const Vec3& direction,
                               double focal);

/// Sine of the image angle between `l` and the ray from its anchor toward the
/// VP `v`. Finite for VPs at infinity.
double line_vp_angle_sine(const HomogeneousLine2& l, const Vec3& v);

/// weight / 2 * line_vp_angle_sine: for a segment line, the distance of the
/// segment endpoints from the line joining its midpoint and `v`, in pixels.
/// The inlier residual of the robust estimators.
double line_vp_deviation(const HomogeneousLine2& l, const Vec3& v);

/// Angle in degrees of R_a^T R_b, in [0, 180].
double rotation_error_deg(const Mat3& r_a, const Mat3& r_b);

/// Rotation error after aligning the estimate's columns to the reference
/// under the 24 signed permutations with det +1. Vanishing points only fix
/// the axes up to sign and order, so this is the error reported in studies.
double aligned_rotation_error_deg(const Mat3& r_est, const Mat3& r_gt);

/// Mean angle between matched calibrated directions, best of the 6
/// permutations, treating directions as axes. In [0, 90].
double vp_error_deg(const ManhattanFrame& est, const ManhattanFrame& gt);

/// Area under the recall curve sampled at k * max_threshold / n_thresholds,
/// k = 1..n, scaled to [0, max_threshold].
double auc(std::span<const double> errors, double max_threshold = 10.0,
           int n_thresholds = 20);

/// Closest rotation in Frobenius norm (det +1).
Mat3 nearest_rotation(const Mat3& d);

EvalMetrics evaluate(const ManhattanFrame& est, const ManhattanFrame& gt);

/// Rotation by angle_rad around a unit axis.
Mat3 axis_angle(const Vec3& axis, double angle_rad);

/// Matrix of the cross product: skew(a) * b = a x b.
Mat3 skew(const Vec3& a);

constexpr double kPi = 3.14159265358979323846;
constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace vpest
