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

#include "vpest/minimal_solvers.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

#include "vpest/polynomial.hpp"

namespace vpest {

namespace {

// Denominators below this (on unit-norm inputs) are treated as zero.
constexpr double kSingularTol = 1e-12;
// Max normalized residual of both half-angle equations at an accepted t.
constexpr double kCommonRootTol = 1e-6;

Vec3 unit(const HomogeneousLine2& l) { return l.coeffs().normalized(); }

// Builds [d1 d2 d1 x d2] with d2 re-orthogonalized against d1.
ManhattanFrame make_frame(const Vec3& d1, Vec3 d2, double focal) {
  d2 -= d1.dot(d2) * d1;
  d2.normalize();
  Vec3 d3 = d1.cross(d2).normalized();
  ManhattanFrame frame;
  frame.rotation.col(0) = d1;
  frame.rotation.col(1) = d2;
  frame.rotation.col(2) = d3;
  if (frame.rotation.determinant() < 0.0) frame.rotation.col(2) *= -1.0;
  frame.focal = focal;
  return frame;
}

Vec3 calibrate(const Vec3& v, double f) { return Vec3(v(0) / f, v(1) / f, v(2)).normalized(); }

Vec3 k_transpose_line(const HomogeneousLine2& l, double f) {
  return Vec3(f * l(0), f * l(1), l(2));
}

// Returns false when the two lines meet nowhere in the finite projective
// sense (identical lines).
bool intersect(const HomogeneousLine2& a, const HomogeneousLine2& b, Vec3& v) {
  v = unit(a).cross(unit(b));
  const double n = v.norm();
  if (n < kSingularTol) return false;
  v /= n;
  return true;
}

// Coefficients of the two half-angle equations for the 1-1-0g problem:
//   (1 - t^2)(f d1 + d2) - 2t(f d3 + d4) = 0
//   (1 - t^2)(f d5 + d6) + 2t(f d7 + d8) = 0
struct HalfAngleSystem {
  std::array<double, 8> delta{};

  double alpha1(double f) const { return f * delta[0] + delta[1]; }
  double beta1(double f) const { return f * delta[2] + delta[3]; }
  double alpha2(double f) const { return f * delta[4] + delta[5]; }
  double beta2(double f) const { return f * delta[6] + delta[7]; }
};

HalfAngleSystem half_angle_system(const Vec3& l1, const Vec3& l2, const OrthoBasis& basis) {
  const Vec3& b1 = basis.b1;
  const Vec3& b2 = basis.b2;
  HalfAngleSystem s;
  s.delta = {l1(0) * b1(0) + l1(1) * b1(1), l1(2) * b1(2),
             l1(0) * b2(0) + l1(1) * b2(1), l1(2) * b2(2),
             l2(0) * b2(0) + l2(1) * b2(1), l2(2) * b2(2),
             l2(0) * b1(0) + l2(1) * b1(1), l2(2) * b1(2)};
  return s;
}

// (cos phi, sin phi) from the half-angle tangent, overflow-safe.
std::pair<double, double> half_angle_trig(double t) {
  if (std::abs(t) <= 1.0) {
    const double d = 1.0 + t * t;
    return {(1.0 - t * t) / d, 2.0 * t / d};
  }
  const double u = 1.0 / t;
  const double d = u * u + 1.0;
  return {(u * u - 1.0) / d, 2.0 * u / d};
}

// Residual of alpha*cos - beta*sin (first equation) or alpha*cos + beta*sin
// (second), normalized to be scale-free.
double trig_residual(double alpha, double beta, double c, double s, double sign) {
  const double n = std::hypot(alpha, beta);
  if (n == 0.0) return 0.0;
  return std::abs(alpha * c + sign * beta * s) / n;
}

// Roots of alpha (1 - t^2) + 2 k beta t = 0, i.e. alpha t^2 - 2 k beta t - alpha = 0.
RootSet<2> half_angle_roots(double alpha, double beta, double k) {
  return real_quadratic_roots(alpha, -2.0 * k * beta, -alpha);
}

ManhattanFrame frame_from_angle(const Direction3& g, const OrthoBasis& basis, double c,
                                double s, double f) {
  const Vec3 d2 = c * basis.b1 - s * basis.b2;
  return make_frame(g.vec(), d2, f);
}

}  // namespace

std::string_view solver_name(SolverId id) {
  switch (id) {
    case SolverId::S220: return "220";
    case SolverId::S211: return "211";
    case SolverId::S200g: return "200g";
    case SolverId::S011g: return "011g";
    case SolverId::S110g: return "110g";
  }
  return "?";
}

std::optional<SolverId> parse_solver_name(std::string_view name) {
  for (SolverId id : kAllSolvers) {
    if (solver_name(id) == name) return id;
  }
  return std::nullopt;
}

boost::container::static_vector<int, 4> slot_assignment(SolverId id) {
  switch (id) {
    case SolverId::S220: return {0, 0, 1, 1};
    case SolverId::S211: return {0, 0, 1, 2};
    case SolverId::S200g: return {1, 1};
    case SolverId::S011g: return {0, 1};
    case SolverId::S110g: return {1, 2};
  }
  return {};
}

std::array<int, 3> configuration(SolverId id) {
  std::array<int, 3> counts{0, 0, 0};
  for (int vp : slot_assignment(id)) ++counts[vp];
  return counts;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Ok: return "Ok";
    case SolveStatus::ParallelLines: return "ParallelLines";
    case SolveStatus::GravitySingularity: return "GravitySingularity";
    case SolveStatus::DenominatorSingularity: return "DenominatorSingularity";
    case SolveStatus::NoPositiveFocal: return "NoPositiveFocal";
    case SolveStatus::NoRealRoot: return "NoRealRoot";
    case SolveStatus::NoCommonRoot: return "NoCommonRoot";
    case SolveStatus::NegativeFocalSquared: return "NegativeFocalSquared";
    case SolveStatus::VPsAtInfinity: return "VPsAtInfinity";
    case SolveStatus::NoRootInBracket: return "NoRootInBracket";
    case SolveStatus::Degenerate: return "Degenerate";
    case SolveStatus::ConfigMismatch: return "ConfigMismatch";
  }
  return "?";
}

SolveResult solve_200g(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                       const Direction3& g) {
  Vec3 v2;
  if (!intersect(l1, l2, v2) || std::abs(v2(2)) < kSingularTol) {
    return {SolveStatus::ParallelLines, {}};
  }
  if (std::abs(g(2)) < kSingularTol) return {SolveStatus::GravitySingularity, {}};

  const double f = -(g(0) * v2(0) + g(1) * v2(1)) / (g(2) * v2(2));
  if (!(f > 0.0) || !std::isfinite(f)) return {SolveStatus::NoPositiveFocal, {}};

  SolveResult out;
  out.frames.push_back(make_frame(g.vec(), calibrate(v2, f), f));
  return out;
}

SolveResult solve_011g(const HomogeneousLine2& l_vertical,
                       const HomogeneousLine2& l_horizontal, const Direction3& g) {
  const Vec3 lv = unit(l_vertical);
  const double den = lv(0) * g(0) + lv(1) * g(1);
  if (std::abs(den) < kSingularTol) return {SolveStatus::DenominatorSingularity, {}};

  const double f = -lv(2) * g(2) / den;
  if (!(f > 0.0) || !std::isfinite(f)) return {SolveStatus::NoPositiveFocal, {}};

  const Vec3 d2 = g.vec().cross(k_transpose_line(l_horizontal, f));
  if (d2.norm() < kSingularTol) return {SolveStatus::Degenerate, {}};

  SolveResult out;
  out.frames.push_back(make_frame(g.vec(), d2.normalized(), f));
  return out;
}

OrthoBasis build_ortho_basis(const Direction3& g) {
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(g(i)) < std::abs(g(axis))) axis = i;
  }
  const Vec3 u = Vec3::Unit(axis);
  const Vec3 b1p = g.vec().cross(u);
  const Vec3 b1 = b1p.normalized();
  const Vec3 b2 = g.vec().cross(b1p).normalized();
  return {b1, b2};
}

SolveResult solve_110g(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                       const Direction3& g) {
  const OrthoBasis basis = build_ortho_basis(g);
  const HalfAngleSystem sys = half_angle_system(unit(l1), unit(l2), basis);
  const auto& d = sys.delta;

  // (f d1 + d2)(f d7 + d8) + (f d3 + d4)(f d5 + d6) = 0
  const double a2 = d[0] * d[6] + d[2] * d[4];
  const double a1 = d[0] * d[7] + d[1] * d[6] + d[2] * d[5] + d[3] * d[4];
  const double a0 = d[1] * d[7] + d[3] * d[5];
  const RootSet<2> focals = real_quadratic_roots(a2, a1, a0);
  if (focals.empty()) return {SolveStatus::NoRealRoot, {}};

  SolveResult out;
  bool any_positive = false;
  for (double f : focals) {
    if (!(f > 0.0) || !std::isfinite(f)) continue;
    any_positive = true;
    const double al1 = sys.alpha1(f), be1 = sys.beta1(f);
    const double al2 = sys.alpha2(f), be2 = sys.beta2(f);

    // Candidates from both equations; keep the one that best satisfies both.
    RootSet<4> candidates;
    for (double t : half_angle_roots(al1, be1, -1.0)) candidates.push_back(t);
    for (double t : half_angle_roots(al2, be2, 1.0)) candidates.push_back(t);
    double best_residual = std::numeric_limits<double>::infinity();
    std::pair<double, double> best_trig{1.0, 0.0};
    for (double t : candidates) {
      const auto [c, s] = half_angle_trig(t);
      const double r = std::max(trig_residual(al1, be1, c, s, -1.0),
                                trig_residual(al2, be2, c, s, 1.0));
      if (r < best_residual) {
        best_residual = r;
        best_trig = {c, s};
      }
    }
    if (!(best_residual <= kCommonRootTol)) continue;
    out.frames.push_back(frame_from_angle(g, basis, best_trig.first, best_trig.second, f));
  }
  if (out.frames.empty()) {
    out.status = any_positive ? SolveStatus::NoCommonRoot : SolveStatus::NoPositiveFocal;
  }
  return out;
}

SolveResult solve_110g_quartic(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                               const Direction3& g) {
  const OrthoBasis basis = build_ortho_basis(g);
  const HalfAngleSystem sys = half_angle_system(unit(l1), unit(l2), basis);
  const auto& d = sys.delta;

  // Substituting f from the first equation into the second gives
  //   (1-t^2)^2 c0 + 2t(1-t^2) c1 + 4t^2 c2 = 0.
  const double c0 = d[0] * d[5] - d[1] * d[4];
  const double c1 = d[3] * d[4] + d[0] * d[7] - d[2] * d[5] - d[1] * d[6];
  const double c2 = d[3] * d[6] - d[2] * d[7];
  const std::array<double, 5> quartic{c0, -2.0 * c1, -2.0 * c0 + 4.0 * c2, 2.0 * c1, c0};
  const RootSet<4> ts = real_polynomial_roots(quartic);
  if (ts.empty()) return {SolveStatus::NoRealRoot, {}};

  SolveResult out;
  bool any_positive = false;
  for (double t : ts) {
    const auto [c, s] = half_angle_trig(t);
    // Each equation is linear in f: f (d1 c - d3 s) + (d2 c - d4 s) = 0 and
    // f (d5 c + d7 s) + (d6 c + d8 s) = 0. Use the better conditioned one.
    const double p1 = d[0] * c - d[2] * s, q1 = d[1] * c - d[3] * s;
    const double p2 = d[4] * c + d[6] * s, q2 = d[5] * c + d[7] * s;
    const double f = std::abs(p1) >= std::abs(p2) ? -q1 / p1 : -q2 / p2;
    if (!(f > 0.0) || !std::isfinite(f)) continue;
    any_positive = true;
    // t and -1/t describe the same axes; keep one frame per focal root.
    const bool duplicate = std::any_of(out.frames.begin(), out.frames.end(), [f](const auto& fr) {
      return std::abs(fr.focal - f) <= 1e-9 * f;
    });
    if (duplicate) continue;
    out.frames.push_back(frame_from_angle(g, basis, c, s, f));
  }
  if (out.frames.empty()) {
    out.status = any_positive ? SolveStatus::NoCommonRoot : SolveStatus::NoPositiveFocal;
  }
  return out;
}

SolveResult solve_220(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                      const HomogeneousLine2& l3, const HomogeneousLine2& l4) {
  Vec3 v1, v2;
  if (!intersect(l1, l2, v1) || !intersect(l3, l4, v2)) {
    return {SolveStatus::ParallelLines, {}};
  }
  const double den = v1(2) * v2(2);
  if (std::abs(den) < kSingularTol) return {SolveStatus::VPsAtInfinity, {}};
  const double f2 = -(v1(0) * v2(0) + v1(1) * v2(1)) / den;
  if (!(f2 > 0.0) || !std::isfinite(f2)) return {SolveStatus::NegativeFocalSquared, {}};

  const double f = std::sqrt(f2);
  SolveResult out;
  out.frames.push_back(make_frame(calibrate(v1, f), calibrate(v2, f), f));
  return out;
}

SolveResult solve_211(const HomogeneousLine2& l1, const HomogeneousLine2& l2,
                      const HomogeneousLine2& l3, const HomogeneousLine2& l4,
                      const FocalBracket& bracket) {
  Vec3 v1;
  if (!intersect(l1, l2, v1)) return {SolveStatus::ParallelLines, {}};
  const Vec3 a = unit(l3);
  const Vec3 b = unit(l4);

  // With d1(f) ~ (v1x, v1y, f v1z), d2 ~ d1 x K^T l3 and d3 ~ d1 x K^T l4,
  // the constraint d2 . d3 = 0 is a quadratic in F = f^2. The linear
  // coefficient is expanded through the Lagrange identity so that the large
  // in-plane terms cancel analytically instead of numerically.
  v1.normalize();
  const Vec2 vxy = v1.head<2>();
  const double vz = v1(2);
  const Vec2 axy = a.head<2>();
  const Vec2 bxy = b.head<2>();
  const double cross_a = vxy(0) * axy(1) - vxy(1) * axy(0);
  const double cross_b = vxy(0) * bxy(1) - vxy(1) * bxy(0);
  const double quad = vz * vz * axy.dot(bxy);
  const double lin = cross_a * cross_b - vz * (vxy.dot(axy) * b(2) + vxy.dot(bxy) * a(2));
  const double cst = vxy.squaredNorm() * a(2) * b(2);
  // The leading coefficient vanishes as v1 approaches infinity, which sends
  // one root to infinity; the stable Vieta form keeps the finite root exact.
  RootSet<2> roots;
  const double disc = lin * lin - 4.0 * quad * cst;
  if (disc >= 0.0) {
    const double half = -0.5 * (lin + std::copysign(std::sqrt(disc), lin));
    if (half != 0.0) {
      roots.push_back(cst / half);
      if (quad != 0.0) roots.push_back(half / quad);
    }
  }
  if (roots.empty()) return {SolveStatus::NoRealRoot, {}};

  SolveResult out;
  bool any_positive = false;
  for (double f2 : roots) {
    if (!(f2 > 0.0) || !std::isfinite(f2)) continue;
    const double f = std::sqrt(f2);
    any_positive = true;
    if (!bracket.contains(f)) continue;
    if (std::any_of(out.frames.begin(), out.frames.end(),
                    [f](const auto& fr) { return std::abs(fr.focal - f) <= 1e-12 * f; })) {
      continue;
    }
    const Vec3 d1 = Vec3(v1(0), v1(1), f * v1(2)).normalized();
    const Vec3 d2 = d1.cross(k_transpose_line(l3, f));
    if (d2.norm() < kSingularTol * f) continue;
    out.frames.push_back(make_frame(d1, d2.normalized(), f));
  }
  if (out.frames.empty()) {
    out.status = any_positive ? SolveStatus::NoRootInBracket : SolveStatus::NoPositiveFocal;
  }
  return out;
}

SolveResult run_solver(SolverId id, const MinimalSample& sample,
                       const GravityObservation& gravity, const FocalBracket& bracket) {
  const auto expected = slot_assignment(id);
  if (sample.lines.size() != expected.size() ||
      !std::equal(expected.begin(), expected.end(), sample.assignment.begin(),
                  sample.assignment.end())) {
    throw Error(ErrorCode::ConfigMismatch,
                "sample does not match configuration " + std::string(solver_name(id)));
  }
  if (needs_gravity(id) && !gravity.present()) {
    throw Error(ErrorCode::ConfigMismatch,
                "solver " + std::string(solver_name(id)) + " needs a gravity direction");
  }
  const auto& l = sample.lines;
  switch (id) {
    case SolverId::S220: return solve_220(l[0], l[1], l[2], l[3]);
    case SolverId::S211: return solve_211(l[0], l[1], l[2], l[3], bracket);
    case SolverId::S200g: return solve_200g(l[0], l[1], Direction3(gravity.direction));
    case SolverId::S011g: return solve_011g(l[0], l[1], Direction3(gravity.direction));
    case SolverId::S110g: return solve_110g(l[0], l[1], Direction3(gravity.direction));
  }
  return {SolveStatus::ConfigMismatch, {}};
}

}  // namespace vpest
