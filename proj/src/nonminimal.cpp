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

#include "vpest/nonminimal.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Geometry>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace vpest {

namespace {

Vec3 calibrate(const Vec3& v, double f) { return Vec3(v(0) / f, v(1) / f, v(2)).normalized(); }

// Stack calibrated directions, sign-aligned with a reference rotation so the
// matrix is close to a proper rotation before projecting onto SO(3).
Mat3 aligned_directions(const std::array<Vec3, 3>& dirs, const Mat3& reference) {
  Mat3 d;
  std::array<double, 3> agreement{};
  for (int i = 0; i < 3; ++i) {
    Vec3 di = dirs[static_cast<std::size_t>(i)];
    double dot = di.dot(reference.col(i));
    if (dot < 0.0) {
      di = -di;
      dot = -dot;
    }
    d.col(i) = di;
    agreement[static_cast<std::size_t>(i)] = dot;
  }
  if (d.determinant() < 0.0) {
    int weakest = 0;
    for (int i = 1; i < 3; ++i) {
      if (agreement[static_cast<std::size_t>(i)] < agreement[static_cast<std::size_t>(weakest)]) {
        weakest = i;
      }
    }
    d.col(weakest) *= -1.0;
  }
  return d;
}

// Signed line_vp_deviation of `l` against the VP u (any scale), and its
// gradient with respect to u.
double signed_deviation(const HomogeneousLine2& l, const Vec3& u, Vec3* grad) {
  const Vec3& c = l.coeffs();
  const Vec2 q = u.head<2>() - u(2) * l.anchor();
  const double d = q.norm();
  const double scale = 0.5 * l.weight();
  if (!(d > 1e-12 * u.norm())) {
    if (grad) grad->setZero();
    return 0.0;
  }
  const double lu = c.dot(u);
  if (grad) {
    const Vec3 dq_term(q(0), q(1), -l.anchor().dot(q));
    *grad = scale * (c / d - (lu / (d * d * d)) * dq_term);
  }
  return scale * lu / d;
}

}  // namespace

Vec3 refit_vp_lsq(std::span<const HomogeneousLine2> lines) {
  if (lines.size() < 2) {
    throw Error(ErrorCode::InsufficientLines, "VP refit needs at least two lines");
  }
  Eigen::MatrixX3d m(static_cast<Eigen::Index>(lines.size()), 3);
  for (std::size_t j = 0; j < lines.size(); ++j) {
    const Vec3& c = lines[j].coeffs();
    m.row(static_cast<Eigen::Index>(j)) = lines[j].weight() * c.transpose() / std::hypot(c(0), c(1));
  }
  Eigen::JacobiSVD<Eigen::MatrixX3d> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() < 2 || s(1) <= 1e-12 * s(0)) {
    throw Error(ErrorCode::DegenerateBundle, "lines do not determine a single VP");
  }
  return svd.matrixV().col(2).normalized();
}

double focal_from_vps(const Vec3& v1_in, const Vec3& v2_in, const Vec3& v3_in) {
  const std::array<Vec3, 3> v{v1_in.normalized(), v2_in.normalized(), v3_in.normalized()};
  constexpr std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  double aa = 0.0, ab = 0.0;
  for (const auto& [i, j] : pairs) {
    const Vec3& a = v[static_cast<std::size_t>(i)];
    const Vec3& b = v[static_cast<std::size_t>(j)];
    const double lhs = -a(2) * b(2);
    const double rhs = a(0) * b(0) + a(1) * b(1);
    aa += lhs * lhs;
    ab += lhs * rhs;
  }
  if (!(aa > 1e-24)) {
    throw Error(ErrorCode::RankDeficient, "focal is unobservable from these VPs");
  }
  const double f2 = ab / aa;
  if (!(f2 > 0.0) || !std::isfinite(f2)) {
    throw Error(ErrorCode::NonPositiveFocalSquared, "least-squares f^2 is not positive");
  }
  return std::sqrt(f2);
}

ManhattanFrame nonminimal_solve(const InlierPartition& part, const ManhattanFrame& fallback,
                                NonMinimalDiagnostics* diagnostics) {
  if (diagnostics) ++diagnostics->calls;
  try {
    for (int i = 0; i < 3; ++i) {
      if (part.count(i) < 2) {
        throw Error(ErrorCode::InsufficientLines, "each VP needs two inliers");
      }
    }
    std::array<Vec3, 3> vps;
    for (std::size_t i = 0; i < 3; ++i) vps[i] = refit_vp_lsq(part.sets[i]);
    const double f = focal_from_vps(vps[0], vps[1], vps[2]);
    std::array<Vec3, 3> dirs;
    for (std::size_t i = 0; i < 3; ++i) dirs[i] = calibrate(vps[i], f);
    ManhattanFrame out;
    out.rotation = nearest_rotation(aligned_directions(dirs, fallback.rotation));
    out.focal = f;
    return out;
  } catch (const Error&) {
    if (diagnostics) ++diagnostics->fallbacks;
    return fallback;
  }
}

ManhattanFrame snap_vertical(const ManhattanFrame& frame, const Vec3& vertical) {
  const Vec3 current = frame.rotation.col(0);
  Vec3 up = vertical.normalized();
  if (up.dot(current) < 0.0) up = -up;
  const Mat3 align = Eigen::Quaterniond::FromTwoVectors(current, up).toRotationMatrix();
  ManhattanFrame out = frame;
  out.rotation = align * frame.rotation;
  out.rotation.col(0) = up;
  out.rotation.col(1) = (out.rotation.col(1) - up.dot(out.rotation.col(1)) * up).normalized();
  out.rotation.col(2) = up.cross(out.rotation.col(1));
  return out;
}

double partition_cost(const ManhattanFrame& frame, const InlierPartition& part) {
  return refine_residuals(frame, part).squaredNorm();
}

ManhattanFrame nonminimal_linearized(const InlierPartition& part, const ManhattanFrame& init,
                                     int iters) {
  if (iters < 1) throw Error(ErrorCode::InvalidArgument, "iters must be >= 1");
  const auto n = static_cast<Eigen::Index>(part.total());
  if (n < 4) return init;

  ManhattanFrame current = init;
  ManhattanFrame best = init;
  double best_cost = partition_cost(init, part);

  for (int it = 0; it < iters; ++it) {
    const double f0 = current.focal;
    const Mat3& r0 = current.rotation;
    // v_i ~ B_i dx + c_i with dx = (rotation increment, focal increment).
    std::array<Eigen::Matrix<double, 3, 4>, 3> b;
    std::array<Vec3, 3> c;
    for (int i = 0; i < 3; ++i) {
      const double r1 = r0(0, i), r2 = r0(1, i), r3 = r0(2, i);
      auto& bi = b[static_cast<std::size_t>(i)];
      bi << 0.0, -f0 * r3, f0 * r2, r1,
            f0 * r3, 0.0, -f0 * r1, r2,
            -r2, r1, 0.0, 0.0;
      c[static_cast<std::size_t>(i)] = Vec3(f0 * r1, f0 * r2, r3);
    }
    Eigen::MatrixX4d lhs(n, 4);
    Eigen::VectorXd rhs(n);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      for (const auto& l : part.sets[i]) {
        const Vec3 a = l.weight() * l.coeffs() / std::hypot(l(0), l(1));
        lhs.row(row) = a.transpose() * b[i];
        rhs(row) = -a.dot(c[i]);
        ++row;
      }
    }
    const auto qr = lhs.colPivHouseholderQr();
    if (qr.rank() < 4) break;
    const Eigen::Vector4d dx = qr.solve(rhs);

    std::array<Vec3, 3> vps;
    for (std::size_t i = 0; i < 3; ++i) vps[i] = b[i] * dx + c[i];
    try {
      const double f = focal_from_vps(vps[0], vps[1], vps[2]);
      std::array<Vec3, 3> dirs;
      for (std::size_t i = 0; i < 3; ++i) dirs[i] = calibrate(vps[i], f);
      current.rotation = nearest_rotation(aligned_directions(dirs, r0));
      current.focal = f;
    } catch (const Error&) {
      break;
    }
    const double cost = partition_cost(current, part);
    if (cost < best_cost) {
      best_cost = cost;
      best = current;
    }
  }
  return best;
}

ManhattanFrame apply_chart_step(const ManhattanFrame& frame, const ChartStep& step) {
  ManhattanFrame out;
  const Vec3 w = step.head<3>();
  const double angle = w.norm();
  Mat3 exp_w = Mat3::Identity();
  if (angle > 0.0) exp_w = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
  out.rotation = frame.rotation * exp_w;
  out.focal = frame.focal * std::exp(step(3));
  return out;
}

Eigen::VectorXd refine_residuals(const ManhattanFrame& frame, const InlierPartition& part) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(part.total()));
  Eigen::Index row = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 u = frame.intrinsics() * frame.rotation.col(i);
    for (const auto& l : part.sets[static_cast<std::size_t>(i)]) {
      r(row++) = signed_deviation(l, u, nullptr);
    }
  }
  return r;
}

Eigen::MatrixX4d refine_jacobian(const ManhattanFrame& frame, const InlierPartition& part) {
  Eigen::MatrixX4d jac(static_cast<Eigen::Index>(part.total()), 4);
  const double f = frame.focal;
  const Mat3 k = frame.intrinsics();
  Eigen::Index row = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 r = frame.rotation.col(i);
    const Vec3 u = k * r;
    // du/dw_k = K R (e_k x e_i), du/ds = (f r0, f r1, 0).
    Eigen::Matrix<double, 3, 4> du;
    for (int kk = 0; kk < 3; ++kk) {
      du.col(kk) = k * frame.rotation * Vec3::Unit(kk).cross(Vec3::Unit(i));
    }
    du.col(3) = Vec3(f * r(0), f * r(1), 0.0);
    for (const auto& l : part.sets[static_cast<std::size_t>(i)]) {
      Vec3 grad;
      signed_deviation(l, u, &grad);
      jac.row(row++) = grad.transpose() * du;
    }
  }
  return jac;
}

ManhattanFrame refine_ls(const ManhattanFrame& frame, const InlierPartition& part,
                         const RefineOptions& options) {
  if (part.total() == 0) return frame;
  ManhattanFrame current = frame;
  Eigen::VectorXd r = refine_residuals(current, part);
  double cost = r.squaredNorm();
  double lambda = options.initial_damping;

  for (int it = 0; it < options.max_iters && cost > 0.0; ++it) {
    Eigen::MatrixX4d jac = refine_jacobian(current, part);
    if (options.lock_vertical) jac.middleCols<2>(1).setZero();
    const Eigen::Matrix4d h = jac.transpose() * jac;
    const Eigen::Vector4d g = jac.transpose() * r;
    if (!g.allFinite() || g.lpNorm<Eigen::Infinity>() == 0.0) break;

    bool accepted = false;
    while (lambda < 1e12) {
      Eigen::Matrix4d damped = h;
      const double floor = 1e-12 * std::max(1.0, h.diagonal().maxCoeff());
      for (int d = 0; d < 4; ++d) damped(d, d) += lambda * std::max(h(d, d), floor);
      Eigen::Vector4d step = damped.ldlt().solve(-g);
      if (options.lock_vertical) step.segment<2>(1).setZero();
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const ManhattanFrame candidate = apply_chart_step(current, step);
      const Eigen::VectorXd r_new = refine_residuals(candidate, part);
      const double cost_new = r_new.squaredNorm();
      if (cost_new < cost) {
        const double decrease = (cost - cost_new) / cost;
        current = candidate;
        r = r_new;
        cost = cost_new;
        lambda = std::max(lambda * 0.1, 1e-15);
        accepted = true;
        if (decrease < options.relative_tolerance) it = options.max_iters;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }
  return current;
}

}  // namespace vpest
