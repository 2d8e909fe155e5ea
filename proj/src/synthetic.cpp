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

#include "vpest/synthetic.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace vpest {

namespace {

constexpr int kMaxRetries = 100;
constexpr double kMinDepth = 0.1;

}  // namespace

Rng derived_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

Mat3 random_rotation(Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::Quaterniond q;
  do {
    q.coeffs() << normal(rng), normal(rng), normal(rng), normal(rng);
  } while (q.norm() < 1e-12);
  return q.normalized().toRotationMatrix();
}

Vec3 perturb_gravity(const Vec3& g, double sigma_deg, Rng& rng) {
  std::normal_distribution<double> normal;
  Vec3 axis;
  do {
    axis << normal(rng), normal(rng), normal(rng);
  } while (axis.norm() < 1e-12);
  const double angle = deg2rad(sigma_deg * normal(rng));
  if (angle == 0.0) return g;
  return (axis_angle(axis, angle) * g).normalized();
}

void SyntheticConfig::validate() const {
  if (!(focal_min > 0.0) || !(focal_max >= focal_min)) {
    throw Error(ErrorCode::InvalidArgument, "focal range must be positive and ordered");
  }
  if (anchor_std < 0.0 || lambda_std < 0.0 || sigma_image_px < 0.0 || sigma_gravity_deg < 0.0 ||
      sigma_pp_px < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "standard deviations must be non-negative");
  }
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "outlier fraction must be in [0, 1)");
  }
  for (int n : lines_per_direction) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative line count");
  }
}

std::vector<HomogeneousLine2> SyntheticInstance::lines() const {
  std::vector<HomogeneousLine2> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(line_from_segment(s.segment, Vec2::Zero()));
  return out;
}

SyntheticInstance generate_instance(const SyntheticConfig& cfg, Rng& rng) {
  cfg.validate();
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;

  SyntheticInstance inst;
  inst.gt_frame.rotation = random_rotation(rng);
  inst.gt_frame.focal = cfg.focal_min + (cfg.focal_max - cfg.focal_min) * uniform(rng);
  inst.gravity_gt = inst.gt_frame.rotation.col(0);
  inst.gravity_noisy = perturb_gravity(inst.gravity_gt, cfg.sigma_gravity_deg, rng);
  const double pp_x = normal(rng), pp_y = normal(rng);
  inst.principal_offset = cfg.sigma_pp_px * Vec2(pp_x, pp_y);

  const double f = inst.gt_frame.focal;
  const auto project = [&](const Vec3& x) -> Vec2 {
    return Vec2(f * x(0) / x(2), f * x(1) / x(2)) + inst.principal_offset;
  };

  for (int dir = 0; dir < 3; ++dir) {
    const Vec3 d = inst.gt_frame.rotation.col(dir);
    for (int k = 0; k < cfg.lines_per_direction[static_cast<std::size_t>(dir)]; ++k) {
      bool ok = false;
      for (int attempt = 0; attempt < kMaxRetries && !ok; ++attempt) {
        Vec3 xa;
        xa << normal(rng), normal(rng), normal(rng);
        xa = cfg.anchor_mean + cfg.anchor_std * xa;
        const double lambda = cfg.lambda_std * normal(rng);
        const Vec3 xb = xa + lambda * d;
        Vec2 noise_a, noise_b;
        noise_a << normal(rng), normal(rng);
        noise_b << normal(rng), normal(rng);
        if (xa(2) < kMinDepth || xb(2) < kMinDepth) continue;
        LabeledSegment seg;
        seg.segment.p = project(xa) + cfg.sigma_image_px * noise_a;
        seg.segment.q = project(xb) + cfg.sigma_image_px * noise_b;
        seg.label = dir;
        if ((seg.segment.p - seg.segment.q).norm() < 1e-6) continue;
        inst.segments.push_back(seg);
        ok = true;
      }
      if (!ok) throw Error(ErrorCode::InvalidArgument, "DegenerateDraw: retry budget exhausted");
    }
  }

  const auto inliers = static_cast<double>(inst.segments.size());
  const auto outliers = static_cast<int>(
      std::lround(cfg.outlier_fraction / (1.0 - cfg.outlier_fraction) * inliers));
  const double w = cfg.outlier_half_window_px;
  for (int k = 0; k < outliers; ++k) {
    LabeledSegment seg;
    do {
      seg.segment.p = Vec2(-w + 2.0 * w * uniform(rng), -w + 2.0 * w * uniform(rng));
      seg.segment.q = Vec2(-w + 2.0 * w * uniform(rng), -w + 2.0 * w * uniform(rng));
    } while ((seg.segment.p - seg.segment.q).norm() < 1e-6);
    inst.segments.push_back(seg);
  }
  return inst;
}

SyntheticInstance generate_instance(const SyntheticConfig& cfg, std::uint64_t index) {
  Rng rng = derived_rng(cfg.seed, index);
  return generate_instance(cfg, rng);
}

}  // namespace vpest
