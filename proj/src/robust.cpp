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

#include "vpest/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace vpest {

namespace {

// Stream offsets for the auxiliary generators derived from the seed. The
// main stream (sampling and LO) is seeded directly.
constexpr std::uint64_t kSolverChoiceStream = 1;
constexpr std::uint64_t kGravityJitterStream = 2;

constexpr double kFrameTol = 1e-6;
constexpr int kFinalRefitRounds = 5;

SolverId choose_solver(const SolverWeights& probs, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double acc = 0.0;
  int last = -1;
  for (int j = 0; j < 5; ++j) {
    if (probs[static_cast<std::size_t>(j)] <= 0.0) continue;
    acc += probs[static_cast<std::size_t>(j)];
    last = j;
    if (u < acc) return kAllSolvers[static_cast<std::size_t>(j)];
  }
  return kAllSolvers[static_cast<std::size_t>(last)];
}

bool draw_sample(std::span<const HomogeneousLine2> lines, SolverId id, Rng& rng,
                 MinimalSample& sample) {
  const int m = sample_size(id);
  std::uniform_int_distribution<std::size_t> pick(0, lines.size() - 1);
  std::array<std::size_t, 4> idx{};
  for (int s = 0; s < m; ++s) {
    std::size_t candidate;
    do {
      candidate = pick(rng);
    } while (std::find(idx.begin(), idx.begin() + s, candidate) != idx.begin() + s);
    idx[static_cast<std::size_t>(s)] = candidate;
  }
  sample.lines.clear();
  sample.assignment = slot_assignment(id);
  for (int s = 0; s < m; ++s) sample.lines.push_back(lines[idx[static_cast<std::size_t>(s)]]);
  return true;
}

// One non-minimal refit (Ours) and/or refinement of `start` on `part`.
ManhattanFrame refit(const ManhattanFrame& start, const InlierPartition& part, LoMode mode,
                     const RansacConfig& config, const GravityObservation& gravity) {
  const bool locked = gravity.quality == GravityQuality::Exact;
  ManhattanFrame candidate = start;
  if (mode == LoMode::Ours) {
    candidate = nonminimal_solve(part, candidate);
    if (locked) candidate = snap_vertical(candidate, gravity.direction);
  }
  RefineOptions options;
  options.max_iters = config.refine_iterations;
  options.lock_vertical = locked;
  return refine_ls(candidate, part, options);
}

InlierPartition random_subset(const ScoredFrame& scored, const RansacConfig& config, Rng& rng) {
  std::vector<std::pair<int, const HomogeneousLine2*>> pool;
  pool.reserve(static_cast<std::size_t>(scored.score));
  for (int i = 0; i < 3; ++i) {
    for (const auto& l : scored.partition.sets[static_cast<std::size_t>(i)]) pool.emplace_back(i, &l);
  }
  const auto total = static_cast<int>(pool.size());
  int k = static_cast<int>(std::lround(config.lo_subset_fraction * total));
  k = std::clamp(k, std::min(config.lo_min_subset, total), total);
  for (int s = 0; s < k; ++s) {
    std::uniform_int_distribution<int> pick(s, total - 1);
    std::swap(pool[static_cast<std::size_t>(s)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  InlierPartition part;
  for (int s = 0; s < k; ++s) {
    const auto& [set, line] = pool[static_cast<std::size_t>(s)];
    part.sets[static_cast<std::size_t>(set)].push_back(*line);
  }
  return part;
}

RobustEstimate robust_loop(std::span<const HomogeneousLine2> lines,
                           const GravityObservation& gravity_in, const RansacConfig& config,
                           SolverWeights priors) {
  for (int j = 0; j < 5; ++j) {
    if (needs_gravity(kAllSolvers[static_cast<std::size_t>(j)]) && !gravity_in.present()) {
      priors[static_cast<std::size_t>(j)] = 0.0;
    }
  }
  // Validates that something remains to sample.
  (void)solver_probabilities(priors, 0.5);

  Rng rng(config.seed);
  Rng choice_rng = derived_rng(config.seed, kSolverChoiceStream);
  GravityObservation gravity = gravity_in;
  if (gravity.quality == GravityQuality::Prior) {
    Rng jitter_rng = derived_rng(config.seed, kGravityJitterStream);
    gravity.direction =
        perturb_gravity(gravity.direction, config.prior_gravity_jitter_deg, jitter_rng);
  }

  const auto n = static_cast<double>(lines.size());
  RobustEstimate est;
  std::optional<ScoredFrame> best_scored;
  double inlier_ratio = 0.0;

  const auto terminated = [&]() {
    for (int j = 0; j < 5; ++j) {
      if (priors[static_cast<std::size_t>(j)] <= 0.0) continue;
      const int needed = iterations_needed(inlier_ratio, sample_size(kAllSolvers[static_cast<std::size_t>(j)]),
                                           config.confidence, config.max_iterations);
      if (est.solver_draws[static_cast<std::size_t>(j)] < needed) return false;
    }
    return true;
  };

  MinimalSample sample;
  while (est.iterations_run < config.max_iterations) {
    if (est.iterations_run >= config.min_iterations && terminated()) break;
    const SolverWeights probs = solver_probabilities(priors, best_scored ? inlier_ratio : 0.5);
    const SolverId id = choose_solver(probs, choice_rng);
    ++est.iterations_run;
    ++est.solver_draws[static_cast<std::size_t>(solver_index(id))];

    SolveResult result;
    for (int attempt = 0; attempt < config.max_sample_retries; ++attempt) {
      draw_sample(lines, id, rng, sample);
      result = run_solver(id, sample, gravity, config.focal_bracket);
      if (result.ok()) break;
    }
    if (!result.ok()) continue;

    for (const ManhattanFrame& frame : result.frames) {
      if (!is_valid_frame(frame, kFrameTol)) continue;
      ScoredFrame scored = score_frame(frame, lines, config.inlier_threshold_px);
      if (best_scored && scored.score <= best_scored->score) continue;
      LoResult lo = local_optimize(frame, lines, config, rng, config.lo_mode, gravity);
      est.frame = lo.frame;
      est.lo_improvements += lo.improvements;
      best_scored = std::move(lo.scored);
      inlier_ratio = best_scored->score / n;
    }
  }
  if (!best_scored) {
    throw Error(ErrorCode::NoModelFound, "no minimal sample produced a valid frame");
  }

  // Final refit on every inlier of the best model, repeated while the
  // inlier set changes. It replaces the model whenever it is valid, even at
  // a slightly lower score.
  if (config.lo_mode != LoMode::None) {
    for (int round = 0; round < kFinalRefitRounds; ++round) {
      const ManhattanFrame candidate =
          refit(est.frame, best_scored->partition, config.lo_mode, config, gravity);
      if (!is_valid_frame(candidate, kFrameTol)) break;
      est.frame = candidate;
      ScoredFrame rescored = score_frame(candidate, lines, config.inlier_threshold_px);
      const bool stable = rescored.inlier_indices == best_scored->inlier_indices;
      best_scored = std::move(rescored);
      if (stable) break;
    }
  }

  est.score = best_scored->score;
  est.partition = std::move(best_scored->partition);
  est.inlier_indices = std::move(best_scored->inlier_indices);
  return est;
}

}  // namespace

void RansacConfig::validate() const {
  if (min_iterations < 0 || max_iterations < 1 || lo_iterations < 0 || refine_iterations < 0 ||
      lo_min_subset < 1 || max_sample_retries < 1) {
    throw Error(ErrorCode::InvalidArgument, "iteration counts must be positive");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence must be in (0, 1)");
  }
  if (!(inlier_threshold_px > 0.0) || !std::isfinite(inlier_threshold_px)) {
    throw Error(ErrorCode::InvalidArgument, "inlier threshold must be positive");
  }
  if (!(lo_subset_fraction > 0.0 && lo_subset_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "LO subset fraction must be in (0, 1]");
  }
  double sum = 0.0;
  for (double p : solver_priors) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "solver priors must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "solver priors must sum to 1");
  }
}

ScoredFrame score_frame(const ManhattanFrame& frame, std::span<const HomogeneousLine2> lines,
                        double threshold_px) {

  std::array<Vec3, 3> vps;
  for (int i = 0; i < 3; ++i) vps[static_cast<std::size_t>(i)] = frame.vanishing_point(i);
  ScoredFrame out;
  for (std::size_t j = 0; j < lines.size(); ++j) {
    const HomogeneousLine2& l = lines[j];
    int best = 0;
    double best_residual = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      const double r = line_vp_deviation(l, vps[static_cast<std::size_t>(i)]);
      if (r < best_residual) {
        best_residual = r;
        best = i;
      }
    }
    if (best_residual < threshold_px) {
      out.partition.sets[static_cast<std::size_t>(best)].push_back(l);
      out.inlier_indices[static_cast<std::size_t>(best)].push_back(j);
      out.residual += best_residual * best_residual;
      ++out.score;
    }
  }
  return out;
}

int iterations_needed(double inlier_ratio, int sample_size, double confidence, int cap) {
  if (sample_size < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be positive");
  if (!(inlier_ratio > 0.0)) return cap;
  if (inlier_ratio >= 1.0) return 1;
  const double p_good = std::pow(inlier_ratio, sample_size);
  const double n = std::log(1.0 - confidence) / std::log1p(-p_good);
  if (!std::isfinite(n) || n >= cap) return cap;
  return std::max(1, static_cast<int>(std::ceil(n)));
}

SolverWeights solver_probabilities(const SolverWeights& priors, double inlier_ratio) {
  SolverWeights w{};
  double sum = 0.0;
  for (int j = 0; j < 5; ++j) {
    const auto id = kAllSolvers[static_cast<std::size_t>(j)];
    const double p = priors[static_cast<std::size_t>(j)];
    w[static_cast<std::size_t>(j)] = p * std::pow(inlier_ratio, sample_size(id));
    sum += w[static_cast<std::size_t>(j)];
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::AllZeroWeights, "every solver has zero weight");
  for (double& x : w) x /= sum;
  return w;
}

LoResult local_optimize(const ManhattanFrame& best, std::span<const HomogeneousLine2> lines,
                        const RansacConfig& config, Rng& rng, LoMode mode,
                        const GravityObservation& gravity) {
  LoResult out{best, score_frame(best, lines, config.inlier_threshold_px), 0};
  if (mode == LoMode::None) return out;

  for (int round = 0; round < config.lo_iterations; ++round) {
    if (out.scored.score < 2) break;
    const InlierPartition subset = random_subset(out.scored, config, rng);
    const ManhattanFrame candidate = refit(out.frame, subset, mode, config, gravity);
    if (!is_valid_frame(candidate, kFrameTol)) continue;
    ScoredFrame scored = score_frame(candidate, lines, config.inlier_threshold_px);
    const bool better = scored.score > out.scored.score ||
                        (scored.score == out.scored.score && scored.residual < out.scored.residual);
    if (better) {
      out.frame = candidate;
      out.scored = std::move(scored);
      ++out.improvements;
    }
  }
  return out;
}

RobustEstimate ransac(std::span<const HomogeneousLine2> lines, SolverId solver,
                      const GravityObservation& gravity, const RansacConfig& config) {
  config.validate();
  if (lines.size() < static_cast<std::size_t>(sample_size(solver))) {
    throw Error(ErrorCode::InsufficientLines, "not enough lines for a minimal sample");
  }
  if (needs_gravity(solver) && !gravity.present()) {
    throw Error(ErrorCode::ConfigMismatch,
                "solver " + std::string(solver_name(solver)) + " needs a gravity direction");
  }
  SolverWeights one_hot{};
  one_hot[static_cast<std::size_t>(solver_index(solver))] = 1.0;
  return robust_loop(lines, gravity, config, one_hot);
}

RobustEstimate hybrid_ransac(std::span<const HomogeneousLine2> lines,
                             const GravityObservation& gravity, const RansacConfig& config) {
  config.validate();
  if (lines.size() < 4) {
    throw Error(ErrorCode::InsufficientLines, "hybrid estimation needs at least four lines");
  }
  return robust_loop(lines, gravity, config, config.solver_priors);
}

}  // namespace vpest
