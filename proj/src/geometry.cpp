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

#include "vpest/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>
#include <Eigen/SVD>

namespace vpest {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::SingularInput: return "SingularInput";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientLines: return "InsufficientLines";
    case ErrorCode::DegenerateBundle: return "DegenerateBundle";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonPositiveFocalSquared: return "NonPositiveFocalSquared";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::NoModelFound: return "NoModelFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

HomogeneousLine2::HomogeneousLine2(const Vec3& coeffs, double weight,
                                   const std::optional<Vec2>& anchor)
    : weight_(weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw Error(ErrorCode::InvalidArgument, "line weight must be positive and finite");
  }
  const double n = std::hypot(coeffs(0), coeffs(1));
  if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(coeffs(2))) {
    throw Error(ErrorCode::DegenerateSegment, "line has no finite normal direction");
  }
  coeffs_ = coeffs / n;
  const Vec2 normal = coeffs_.head<2>();
  const Vec2 point = anchor.value_or(Vec2::Zero());
  if (!point.allFinite()) throw Error(ErrorCode::InvalidArgument, "line anchor must be finite");
  anchor_ = point - (normal.dot(point) + coeffs_(2)) * normal;
}

Direction3::Direction3(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidArgument, "direction must be a nonzero finite vector");
  }
  v_ = v / n;
}

Mat3 ManhattanFrame::intrinsics() const {
  Mat3 k = Mat3::Identity();
  k(0, 0) = focal;
  k(1, 1) = focal;
  return k;
}

Vec3 ManhattanFrame::vanishing_point(int i) const {
  const Vec3 d = rotation.col(i);
  // Divide by the larger of 1 and f first so extreme focals cannot overflow.
  if (focal > 1.0) return Vec3(d(0), d(1), d(2) / focal).normalized();
  return Vec3(focal * d(0), focal * d(1), d(2)).normalized();
}

bool is_valid_frame(const ManhattanFrame& frame, double tol) {
  if (!(frame.focal > 0.0) || !std::isfinite(frame.focal)) return false;
  if (!frame.rotation.allFinite()) return false;
  const Mat3 e = frame.rotation.transpose() * frame.rotation - Mat3::Identity();
  if (e.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(frame.rotation.determinant() - 1.0) <= tol;
}

GravityObservation GravityObservation::exact(const Vec3& g) {
  return {Direction3(g).vec(), GravityQuality::Exact};
}

GravityObservation GravityObservation::prior(const Vec3& g) {
  return {Direction3(g).vec(), GravityQuality::Prior};
}

HomogeneousLine2 line_from_segment(const LineSegment& seg, const Vec2& image_size) {
  if (!(image_size.array() >= 0.0).all()) {
    throw Error(ErrorCode::InvalidArgument, "image size must be non-negative");
  }
  if ((seg.p - seg.q).norm() <= 1e-9) {
    throw Error(ErrorCode::DegenerateSegment, "segment endpoints coincide");
  }
  const Vec2 center = 0.5 * image_size;
  const Vec3 a = (seg.p - center).homogeneous();
  const Vec3 b = (seg.q - center).homogeneous();
  return HomogeneousLine2(a.cross(b), seg.weight.value_or((seg.p - seg.q).norm()),
                          0.5 * (a + b).head<2>());
}

double vp_line_distance(const HomogeneousLine2& l, const Vec3& v) {
  const Vec3& c = l.coeffs();
  return std::abs(c.dot(v)) / (v.norm() * std::hypot(c(0), c(1)));
}

double line_direction_residual(const HomogeneousLine2& l, const Vec3& direction,
                               double focal) {
  const Vec3& c = l.coeffs();
  const Vec3 n(focal * c(0), focal * c(1), c(2));
  return std::abs(n.dot(direction)) / (n.norm() * direction.norm());
}

double line_vp_angle_sine(const HomogeneousLine2& l, const Vec3& v) {
  const Vec3& c = l.coeffs();
  const double num = std::abs(c.dot(v));
  const double den = (v.head<2>() - v(2) * l.anchor()).norm();
  if (den <= 1e-300) return num <= 1e-300 ? 0.0 : 1.0;
  return std::min(1.0, num / den);
}

double line_vp_deviation(const HomogeneousLine2& l, const Vec3& v) {
  return 0.5 * l.weight() * line_vp_angle_sine(l, v);
}

double rotation_error_deg(const Mat3& r_a, const Mat3& r_b) {
  const Mat3 m = r_a.transpose() * r_b;
  const Vec3 axis(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  // atan2 of (2 sin, 2 cos) keeps precision near 0 and 180 degrees.
  const double angle = std::atan2(axis.norm(), m.trace() - 1.0);
  return std::clamp(rad2deg(angle), 0.0, 180.0);
}

namespace {

const std::array<Mat3, 24>& proper_signed_permutations() {
  static const std::array<Mat3, 24> table = [] {
    std::array<Mat3, 24> out;
    std::array<int, 3> perm{0, 1, 2};
    std::size_t n = 0;
    do {
      for (int signs = 0; signs < 8; ++signs) {
        Mat3 p = Mat3::Zero();
        for (int c = 0; c < 3; ++c) {
          p(perm[c], c) = (signs >> c) & 1 ? -1.0 : 1.0;
        }
        if (p.determinant() > 0.0) out[n++] = p;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return table;
}

double axis_angle_deg(const Vec3& a, const Vec3& b) {
  return rad2deg(std::atan2(a.cross(b).norm(), std::abs(a.dot(b))));
}

}  // namespace

double aligned_rotation_error_deg(const Mat3& r_est, const Mat3& r_gt) {
  double best = std::numeric_limits<double>::infinity();
  for (const Mat3& p : proper_signed_permutations()) {
    best = std::min(best, rotation_error_deg(r_est * p, r_gt));
  }
  return best;
}

double vp_error_deg(const ManhattanFrame& est, const ManhattanFrame& gt) {
  std::array<int, 3> perm{0, 1, 2};
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      sum += axis_angle_deg(est.rotation.col(perm[i]), gt.rotation.col(i));
    }
    best = std::min(best, sum / 3.0);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double auc(std::span<const double> errors, double max_threshold, int n_thresholds) {
  if (errors.empty()) throw Error(ErrorCode::EmptyInput, "auc of an empty error list");
  if (n_thresholds < 1 || !(max_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "auc needs n_thresholds >= 1 and max_threshold > 0");
  }
  double recall_sum = 0.0;
  for (int k = 1; k <= n_thresholds; ++k) {
    const double t = max_threshold * k / n_thresholds;
    const auto hits = std::count_if(errors.begin(), errors.end(),
                                    [t](double e) { return e <= t; });
    recall_sum += static_cast<double>(hits) / static_cast<double>(errors.size());
  }
  return max_threshold * recall_sum / n_thresholds;
}

Mat3 nearest_rotation(const Mat3& d) {
  if (!d.allFinite() || std::abs(d.determinant()) <= 1e-12) {
    throw Error(ErrorCode::SingularInput, "nearest_rotation of a singular matrix");
  }
  Eigen::JacobiSVD<Mat3> svd(d, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

EvalMetrics evaluate(const ManhattanFrame& est, const ManhattanFrame& gt) {
  EvalMetrics m;
  m.rotation_error_deg = aligned_rotation_error_deg(est.rotation, gt.rotation);
  m.vp_error_deg = vp_error_deg(est, gt);
  m.focal_abs_error = std::abs(est.focal - gt.focal);
  m.focal_rel_error = m.focal_abs_error / gt.focal;
  return m;
}

Mat3 axis_angle(const Vec3& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a(2), a(1),
       a(2), 0.0, -a(0),
       -a(1), a(0), 0.0;
  return s;
}

}  // namespace vpest
